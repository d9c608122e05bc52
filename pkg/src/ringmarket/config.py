"""JSON run configuration: parsing, validation and serialization."""

from __future__ import annotations

import json
from dataclasses import fields
from typing import Any

from ringmarket.equilibrium import StrategyGrid
from ringmarket.geography import Geography, canonical_arrangement
from ringmarket.market import DEFAULT_COST, DEFAULT_U, MarketConfig
from ringmarket.taxation import DEFAULT_GAMMA, DEFAULT_LAMBDA, TaxKind, TaxScheme

TOP_LEVEL_KEYS = {"ring_length", "firms", "buyers", "u", "tax", "grids"}
GRID_KEYS = tuple(f.name for f in fields(StrategyGrid))


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def _object(value: Any, path: str, allowed: set[str] | tuple[str, ...]) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}" if path != "$" else key, "unknown field")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise ConfigError(path, f"expected a list, got {type(value).__name__}")
    return value


def parse_config(text: str | dict) -> tuple[MarketConfig, StrategyGrid]:
    """Build a validated market and grid from a JSON document (or its parsed dict).

    Missing fields default to the canonical arrangement, no tax (with
    lambda 0.1 and gamma 1 ready for the taxed kinds), u = 120 and unit
    costs of 100.
    """
    if isinstance(text, str):
        try:
            doc = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from exc
    else:
        doc = text
    doc = _object(doc, "$", TOP_LEVEL_KEYS)
    canonical = canonical_arrangement()

    ring_length = _number(doc.get("ring_length", canonical.ring_length), "ring_length")
    if not ring_length > 0:
        raise ConfigError("ring_length", "must be > 0")

    positions, costs = [], []
    for i, firm in enumerate(_list(doc.get("firms", [{"position": p} for p in canonical.firm_positions]), "firms")):
        firm = _object(firm, f"firms[{i}]", ("position", "cost"))
        if "position" not in firm:
            raise ConfigError(f"firms[{i}].position", "required")
        positions.append(_number(firm["position"], f"firms[{i}].position"))
        cost = _number(firm.get("cost", DEFAULT_COST), f"firms[{i}].cost")
        if cost < 0:
            raise ConfigError(f"firms[{i}].cost", "must be >= 0")
        costs.append(cost)
    buyers = [
        _number(b, f"buyers[{i}]")
        for i, b in enumerate(_list(doc.get("buyers", list(canonical.buyer_positions)), "buyers"))
    ]
    try:
        geography = Geography(ring_length, tuple(positions), tuple(buyers))
    except ValueError as exc:
        raise ConfigError("firms/buyers", str(exc)) from exc

    tax_doc = _object(doc.get("tax", {}), "tax", ("kind", "lambda", "gamma"))
    kind = tax_doc.get("kind", TaxKind.NONE.value)
    if kind not in {k.value for k in TaxKind}:
        raise ConfigError("tax.kind", f"must be one of none, cardinal, ordinal; got {kind!r}")
    lam = _number(tax_doc.get("lambda", DEFAULT_LAMBDA), "tax.lambda")
    if lam < 0:
        raise ConfigError("tax.lambda", "lambda must be >= 0")
    gamma = _number(tax_doc.get("gamma", DEFAULT_GAMMA), "tax.gamma")
    if not gamma > 0:
        raise ConfigError("tax.gamma", "gamma must be > 0")

    u = _number(doc.get("u", DEFAULT_U), "u")
    if not u > 0:
        raise ConfigError("u", "must be > 0")

    grid_doc = _object(doc.get("grids", {}), "grids", GRID_KEYS)
    grid_values = {k: _number(v, f"grids.{k}") for k, v in grid_doc.items()}
    try:
        grid = StrategyGrid(**grid_values)
    except ValueError as exc:
        raise ConfigError("grids", str(exc)) from exc

    try:
        config = MarketConfig(geography, TaxScheme(TaxKind(kind), lam, gamma), u, tuple(costs))
    except ValueError as exc:
        raise ConfigError("$", str(exc)) from exc
    return config, grid


def config_to_dict(config: MarketConfig, grid: StrategyGrid) -> dict:
    geo = config.geography
    return {
        "ring_length": geo.ring_length,
        "firms": [{"position": p, "cost": c} for p, c in zip(geo.firm_positions, config.costs)],
        "buyers": list(geo.buyer_positions),
        "u": config.u,
        "tax": {"kind": config.tax.kind.value, "lambda": config.tax.lam, "gamma": config.tax.gamma},
        "grids": {k: getattr(grid, k) for k in GRID_KEYS},
    }


def serialize_config(config: MarketConfig, grid: StrategyGrid) -> str:
    return json.dumps(config_to_dict(config, grid), indent=2)
