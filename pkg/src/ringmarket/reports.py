"""CSV and JSON renderings of run, suite and validation reports."""

from __future__ import annotations

import csv
import io
import json
import math

from ringmarket.config import config_to_dict
from ringmarket.equilibrium import EquilibriumResult, StrategyGrid
from ringmarket.experiments import ScenarioRow, SuiteReport
from ringmarket.market import MarketConfig
from ringmarket.validation import Check

SUITE_COLUMNS = (
    "label", "tax_kind", "c1", "c2", "q1", "q2", "p1", "p2", "profit1", "profit2",
    "rel_profit_diff", "revenue_total", "revenue_normalized", "revenue_ratio",
    "equilibrium_kind", "flags",
)
RUN_COLUMNS = (
    "label", "tax_kind", "c1", "c2", "q1", "q2", "p1", "p2", "profit1", "profit2",
    "revenue1", "revenue2", "revenue_total", "equilibrium_kind", "flags",
)


def fmt(value: float | None) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return f"{value + 0.0:.6f}"


def _json_number(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _csv(columns: tuple[str, ...], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _result_fields(result: EquilibriumResult) -> dict:
    q1, q2 = result.quantities
    p1, p2 = result.prices
    return {
        "q1": fmt(q1), "q2": fmt(q2), "p1": fmt(p1), "p2": fmt(p2),
        "profit1": fmt(result.profits[0]), "profit2": fmt(result.profits[1]),
        "equilibrium_kind": result.kind,
    }


def _suite_csv_row(row: ScenarioRow) -> dict:
    sc = row.scenario
    out = dict.fromkeys(SUITE_COLUMNS, "")
    out.update(label=sc.label, tax_kind=sc.tax.kind.value, c1=fmt(sc.costs[0]), c2=fmt(sc.costs[1]))
    if row.result is not None:
        out.update(_result_fields(row.result))
    else:
        out["equilibrium_kind"] = "failed"
    out.update(
        rel_profit_diff=fmt(row.rel_profit_diff),
        revenue_total=fmt(row.revenue_total),
        revenue_normalized=fmt(row.revenue_normalized),
        revenue_ratio=fmt(row.revenue_ratio),
        flags=";".join(row.flags),
    )
    return out


def suite_csv(report: SuiteReport) -> str:
    return _csv(SUITE_COLUMNS, [_suite_csv_row(r) for r in report.rows])


def suite_json(report: SuiteReport, base: MarketConfig) -> str:
    scenarios = []
    for row in report.rows:
        sc = row.scenario
        scenarios.append({
            "label": sc.label,
            "tax": {"kind": sc.tax.kind.value, "lambda": sc.tax.lam, "gamma": sc.tax.gamma},
            "costs": list(sc.costs),
            "equilibrium": None if row.result is None else row.result.to_dict(),
            "metrics": {
                "rel_profit_diff": _json_number(row.rel_profit_diff),
                "revenue_total": _json_number(row.revenue_total),
                "revenue_normalized": _json_number(row.revenue_normalized),
                "revenue_ratio": _json_number(row.revenue_ratio),
            },
            "flags": list(row.flags),
            "error": row.error,
        })
    return _dump({
        "baseline": report.baseline,
        "config": config_to_dict(base, report.grid),
        "scenarios": scenarios,
    })


def run_csv(config: MarketConfig, result: EquilibriumResult, label: str = "run") -> str:
    out = {
        "label": label, "tax_kind": config.tax.kind.value,
        "c1": fmt(config.costs[0]), "c2": fmt(config.costs[1]),
        **_result_fields(result),
        "revenue1": fmt(result.revenues[0]), "revenue2": fmt(result.revenues[1]),
        "revenue_total": fmt(result.revenues[0] + result.revenues[1]),
        "flags": "" if result.kind == "pure" else f"{result.kind}_stage",
    }
    return _csv(RUN_COLUMNS, [out])


def run_json(config: MarketConfig, grid: StrategyGrid, result: EquilibriumResult) -> str:
    return _dump({"config": config_to_dict(config, grid), "result": result.to_dict()})


def validate_csv(checks: list[Check]) -> str:
    return _csv(("check", "passed", "detail"), [
        {"check": c.name, "passed": str(c.passed).lower(), "detail": c.detail} for c in checks
    ])


def validate_json(checks: list[Check]) -> str:
    return _dump({
        "passed": all(c.passed for c in checks),
        "checks": [{"check": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    })
