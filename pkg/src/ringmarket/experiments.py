"""The tax-scheme by cost-asymmetry scenario suite and its comparison metrics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from ringmarket.equilibrium import EquilibriumResult, SolverError, StrategyGrid, solve_two_stage
from ringmarket.geography import Geography
from ringmarket.market import MarketConfig
from ringmarket.taxation import TaxKind, TaxScheme

log = logging.getLogger(__name__)

SUITE_COSTS = ((100.0, 100.0), (99.0, 100.0), (80.0, 100.0))
SUITE_KINDS = (TaxKind.NONE, TaxKind.CARDINAL, TaxKind.ORDINAL)


def relative_profit_difference(profit_1: float, profit_2: float) -> float:
    """|P1 - P2| relative to the mean profit."""
    if profit_1 == 0 and profit_2 == 0:
        return 0.0
    mean = (profit_1 + profit_2) / 2
    if not mean > 0:
        raise ValueError(f"mean profit {mean} is not positive; relative difference undefined")
    return abs(profit_1 - profit_2) / mean


def firm_revenue_ratio(advantaged: float, other: float) -> float:
    """Revenue of the lower-cost firm over the other's; ``inf`` when the other sells nothing."""
    if other == 0:
        return math.inf
    return advantaged / other


def normalized_revenue(revenue: float, baseline: float) -> float:
    if not baseline > 0:
        raise ValueError(f"baseline revenue must be positive, got {baseline}")
    return revenue / baseline


def scenario_label(kind: TaxKind, costs: tuple[float, ...]) -> str:
    return f"{TaxKind(kind).value}_c" + "-".join(f"{c:g}" for c in costs)


@dataclass(frozen=True)
class Scenario:
    label: str
    tax: TaxScheme
    costs: tuple[float, float]
    grid: StrategyGrid | None = None
    geography: Geography | None = None

    def config(self, base: MarketConfig) -> MarketConfig:
        return replace(
            base,
            tax=self.tax,
            costs=self.costs,
            geography=self.geography or base.geography,
        )


@dataclass(frozen=True)
class ScenarioRow:
    scenario: Scenario
    result: EquilibriumResult | None
    rel_profit_diff: float | None = None
    revenue_total: float | None = None
    revenue_normalized: float | None = None
    revenue_ratio: float | None = None
    flags: tuple[str, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class SuiteReport:
    rows: tuple[ScenarioRow, ...]
    baseline: str
    grid: StrategyGrid = field(default_factory=StrategyGrid)

    def row(self, label: str) -> ScenarioRow:
        for r in self.rows:
            if r.scenario.label == label:
                return r
        raise KeyError(label)


def suite_scenarios(base: MarketConfig) -> list[Scenario]:
    lam, gamma = base.tax.lam, base.tax.gamma
    return [
        Scenario(scenario_label(kind, costs), TaxScheme(kind, lam, gamma), costs)
        for kind in SUITE_KINDS
        for costs in SUITE_COSTS
    ]


def _metrics(scenario: Scenario, result: EquilibriumResult) -> ScenarioRow:
    flags = []
    if result.kind == "mixed_quantity":
        flags.append("mixed_quantity_stage")
    elif result.kind == "mixed_price":
        flags.append("mixed_price_stage")
    p1, p2 = result.profits
    try:
        rel = relative_profit_difference(p1, p2)
    except ValueError:
        rel = None
        flags.append("nonpositive_mean_profit")
    r1, r2 = result.revenues
    c1, c2 = scenario.costs
    ratio = firm_revenue_ratio(r2, r1) if c2 < c1 else firm_revenue_ratio(r1, r2)
    if math.isinf(ratio):
        ratio = None
        flags.append("revenue_ratio_infinite")
    return ScenarioRow(scenario, result, rel, r1 + r2, None, ratio, tuple(flags))


def run_scenarios(
    base: MarketConfig,
    grid: StrategyGrid,
    scenarios: list[Scenario],
    baseline: str,
    threads: int | str | None = 1,
) -> SuiteReport:
    rows = []
    for scenario in scenarios:
        log.info("solving scenario %s", scenario.label)
        try:
            result = solve_two_stage(scenario.config(base), scenario.grid or grid, threads=threads)
        except (SolverError, ValueError) as exc:
            log.warning("scenario %s failed: %s", scenario.label, exc)
            rows.append(ScenarioRow(scenario, None, flags=("solver_error",), error=str(exc)))
            continue
        rows.append(_metrics(scenario, result))

    base_rows = [r for r in rows if r.scenario.label == baseline]
    base_revenue = base_rows[0].revenue_total if base_rows else None
    out = []
    for row in rows:
        if row.result is None:
            out.append(row)
        elif base_revenue is not None and base_revenue > 0:
            out.append(replace(row, revenue_normalized=normalized_revenue(row.revenue_total, base_revenue)))
        else:
            out.append(replace(row, flags=row.flags + ("no_baseline",)))
    return SuiteReport(tuple(out), baseline, grid)


def run_suite(base: MarketConfig, grid: StrategyGrid, threads: int | str | None = 1) -> SuiteReport:
    """Every tax kind crossed with costs (100,100), (99,100) and (80,100).

    Revenues are normalised by the untaxed equal-cost scenario.
    """
    return run_scenarios(
        base,
        grid,
        suite_scenarios(base),
        scenario_label(TaxKind.NONE, SUITE_COSTS[0]),
        threads,
    )
