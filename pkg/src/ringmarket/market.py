"""Demand allocation under capacity limits, sales and profits.

Every buyer has the demand curve ``q = u - e`` in the effective price ``e``.
Buyers visit firms from the cheapest effective price upwards. A firm facing
more demand than its remaining capacity serves everyone in proportion to
what they ask for, and a buyer that got ``s`` units asks the next firm only
for ``u - e - s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ringmarket import _kernels
from ringmarket.geography import Geography
from ringmarket.taxation import TaxScheme

DEFAULT_U = 120.0
DEFAULT_COST = 100.0


@dataclass(frozen=True)
class MarketConfig:
    geography: Geography
    tax: TaxScheme = field(default_factory=TaxScheme)
    u: float = DEFAULT_U
    costs: tuple[float, ...] = (DEFAULT_COST, DEFAULT_COST)

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        if not self.u > 0:
            raise ValueError(f"u must be positive, got {self.u}")
        if any(not c >= 0 for c in self.costs):
            raise ValueError(f"costs must be nonnegative, got {self.costs}")
        if len(self.costs) != self.geography.n_firms:
            raise ValueError(
                f"{len(self.costs)} costs given for {self.geography.n_firms} firms"
            )

    @property
    def n_firms(self) -> int:
        return self.geography.n_firms

    @cached_property
    def multipliers(self) -> np.ndarray:
        return self.tax.multipliers(self.geography)

    @cached_property
    def _preference_base(self) -> np.ndarray:
        # firms listed by ordinal rank for each buyer; breaks effective-price ties
        return np.argsort(self.geography.rank_matrix, axis=1, kind="stable")


@dataclass(frozen=True)
class MarketOutcome:
    produced: np.ndarray
    prices: np.ndarray
    sold: np.ndarray
    revenue: np.ndarray
    profit: np.ndarray
    allocations: np.ndarray  # buyers x firms

    @property
    def total_revenue(self) -> float:
        return float(np.sort(self.revenue).sum())


def buyer_demand(effective: float, u: float) -> float:
    if effective < 0 or not u > 0:
        raise ValueError("effective price must be nonnegative and u positive")
    return max(0.0, u - effective)


def _sorted_sum(x: np.ndarray) -> np.ndarray:
    """Left-to-right sum of the ascending-sorted last axis.

    The result depends only on the multiset of values, which keeps mirrored
    buyer configurations bitwise symmetric.
    """
    ordered = np.sort(x, axis=-1)
    total = np.zeros(ordered.shape[:-1])
    for k in range(ordered.shape[-1]):
        total = total + ordered[..., k]
    return total


def allocate_batch(
    config: MarketConfig, quantities: Sequence[float], prices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Allocate demand for many price profiles at fixed quantities.

    ``prices`` has shape (N, F). Returns per-(profile, buyer, firm) allocations
    with shape (N, B, F) and sold quantities with shape (N, F).
    """
    q = np.asarray(quantities, dtype=float)
    prices = np.asarray(prices, dtype=float)
    n_firms = config.n_firms
    if q.shape != (n_firms,) or prices.ndim != 2 or prices.shape[1] != n_firms:
        raise ValueError("quantities and prices must have one entry per firm")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(prices))) or np.any(q < 0) or np.any(prices < 0):
        raise ValueError("quantities and prices must be finite and nonnegative")
    if n_firms == 2:
        return _kernels.allocate_two(
            np.ascontiguousarray(prices),
            np.ascontiguousarray(config.multipliers),
            np.ascontiguousarray(config.geography.rank_matrix[:, 0] == 0),
            q[0],
            q[1],
            config.u,
        )
    return allocate_reference(config, q, prices)


def _ration(request: np.ndarray, capacity: np.ndarray) -> np.ndarray:
    """Scale (N, B) requests down proportionally where they exceed (N,) capacity."""
    asked = _sorted_sum(request)
    short = asked > capacity
    scale = np.where(short, capacity / np.where(short, asked, 1.0), 1.0)
    return request * scale[:, None]


def allocate_reference(
    config: MarketConfig, quantities: np.ndarray, prices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised allocation for any number of firms; the compiled two-firm
    kernel must agree with it bit for bit."""
    q = np.asarray(quantities, dtype=float)
    prices = np.asarray(prices, dtype=float)
    n_profiles = prices.shape[0]
    n_buyers = config.geography.n_buyers
    n_firms = config.n_firms
    eff = prices[:, None, :] * config.multipliers[None, :, :]

    base = np.broadcast_to(config._preference_base, eff.shape)
    eff_by_rank = np.take_along_axis(eff, base, axis=2)
    perm = np.argsort(eff_by_rank, axis=2, kind="stable")
    visit_order = np.take_along_axis(base, perm, axis=2)
    visit_price = np.take_along_axis(eff_by_rank, perm, axis=2)

    capacity = np.broadcast_to(q, (n_profiles, n_firms)).copy()
    held = np.zeros((n_profiles, n_buyers))
    alloc = np.zeros((n_profiles, n_buyers, n_firms))
    for step in range(n_firms):
        want = np.maximum(0.0, (config.u - visit_price[:, :, step]) - held)
        for firm in range(n_firms):
            request = np.where(visit_order[:, :, step] == firm, want, 0.0)
            got = _ration(request, capacity[:, firm])
            alloc[:, :, firm] += got
            held += got
            capacity[:, firm] = np.maximum(capacity[:, firm] - _sorted_sum(got), 0.0)

    sold = _sorted_sum(alloc.transpose(0, 2, 1))
    # proportional scaling can overshoot a capacity by an ulp; shrink until it holds
    # with subnormal values a one-ulp factor can round away, so later rounds
    # pull the factor further from one until it reaches zero
    over = sold > q
    rounds = np.zeros(sold.shape)
    while np.any(over):
        factor = np.nextafter(q / np.where(over, sold, 1.0), 0.0)
        factor = factor * np.where(rounds > 0, np.maximum(1.0 - 2.0 ** (rounds - 53.0), 0.0), 1.0)
        alloc *= np.where(over, factor, 1.0)[:, None, :]
        rounds += over
        sold = _sorted_sum(alloc.transpose(0, 2, 1))
        over = sold > q
    return alloc, sold


def allocate(
    config: MarketConfig, quantities: Sequence[float], prices: Sequence[float]
) -> MarketOutcome:
    q = np.asarray(quantities, dtype=float)
    p = np.asarray(prices, dtype=float)
    alloc, sold = allocate_batch(config, q, p[None, :])
    sold = sold[0]
    revenue = p * sold
    costs = np.asarray(config.costs)
    return MarketOutcome(
        produced=q,
        prices=p,
        sold=sold,
        revenue=revenue,
        profit=revenue - costs * q,
        allocations=alloc[0],
    )


def profit(config: MarketConfig, outcome: MarketOutcome, firm: int) -> float:
    """Sales revenue minus production cost on every produced unit."""
    if not 0 <= firm < config.n_firms:
        raise IndexError(f"firm index {firm} out of range")
    return float(outcome.prices[firm] * outcome.sold[firm] - config.costs[firm] * outcome.produced[firm])
