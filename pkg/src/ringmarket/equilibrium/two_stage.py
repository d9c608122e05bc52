"""Backward induction for the capacity-then-price duopoly on a grid."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ringmarket.equilibrium.games import (
    BimatrixGame,
    Equilibrium,
    MixedProfile,
    SolverError,
    solve_subgame,
)
from ringmarket.equilibrium.grid import StrategyGrid
from ringmarket.market import MarketConfig, allocate_batch


def _price_pairs(prices: np.ndarray) -> np.ndarray:
    p1, p2 = np.meshgrid(prices, prices, indexing="ij")
    return np.column_stack([p1.ravel(), p2.ravel()])


def _require_duopoly(config: MarketConfig) -> None:
    if config.n_firms != 2:
        raise ValueError(f"the game solver handles exactly two firms, got {config.n_firms}")


def price_subgame_revenues(
    config: MarketConfig, quantities: Sequence[float], prices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Revenue matrices p_i * sold_i over all price pairs (row = firm 1's price)."""
    _require_duopoly(config)
    pairs = _price_pairs(prices)
    _, sold = allocate_batch(config, quantities, pairs)
    revenue = pairs * sold
    shape = (len(prices), len(prices))
    return revenue[:, 0].reshape(shape), revenue[:, 1].reshape(shape)


def build_price_subgame(config: MarketConfig, quantities: Sequence[float], grid: StrategyGrid) -> BimatrixGame:
    prices = grid.prices()
    r1, r2 = price_subgame_revenues(config, quantities, prices)
    labels = tuple(prices.tolist())
    return BimatrixGame(
        r1 - config.costs[0] * quantities[0],
        r2 - config.costs[1] * quantities[1],
        labels,
        labels,
    )


@dataclass(frozen=True)
class EquilibriumResult:
    quantity_grid: np.ndarray
    price_grid: np.ndarray
    quantity_profile: MixedProfile
    price_profiles: dict[tuple[int, int], MixedProfile]
    profits: tuple[float, float]
    revenues: tuple[float, float]
    diagnostics: dict[str, int | str] = field(default_factory=dict)
    quantity_game: BimatrixGame | None = field(default=None, compare=False, repr=False)

    @property
    def is_pure(self) -> bool:
        return self.quantity_profile.is_pure and all(p.is_pure for p in self.price_profiles.values())

    @property
    def kind(self) -> str:
        if not self.quantity_profile.is_pure:
            return "mixed_quantity"
        if not self.price_profile.is_pure:
            return "mixed_price"
        return "pure"

    @property
    def quantities(self) -> tuple[float, float]:
        """Equilibrium capacities; expected values if the quantity stage is mixed."""
        qp = self.quantity_profile
        cell = qp.cell
        if cell is not None:
            return float(self.quantity_grid[cell[0]]), float(self.quantity_grid[cell[1]])
        return float(qp.row_probs @ self.quantity_grid), float(qp.col_probs @ self.quantity_grid)

    @property
    def price_profile(self) -> MixedProfile:
        """Price equilibrium of the selected (or most likely) capacity pair."""
        qp = self.quantity_profile
        weights = {k: qp.row_probs[k[0]] * qp.col_probs[k[1]] for k in self.price_profiles}
        return self.price_profiles[min(weights, key=lambda k: (-weights[k], k))]

    @property
    def prices(self) -> tuple[float, float]:
        """Expected posted prices, averaged over capacity and price randomisation."""
        qp = self.quantity_profile
        e1 = e2 = 0.0
        for (i, j), pp in sorted(self.price_profiles.items()):
            w = qp.row_probs[i] * qp.col_probs[j]
            cell = pp.cell
            if cell is not None:
                e1 += w * self.price_grid[cell[0]]
                e2 += w * self.price_grid[cell[1]]
            else:
                e1 += w * float(pp.row_probs @ self.price_grid)
                e2 += w * float(pp.col_probs @ self.price_grid)
        return float(e1), float(e2)

    def to_dict(self) -> dict:
        def probs(profile: MixedProfile, grid: np.ndarray) -> dict:
            return {
                "firm1": [[float(grid[i]), float(profile.row_probs[i])] for i in profile.row_support],
                "firm2": [[float(grid[j]), float(profile.col_probs[j])] for j in profile.col_support],
            }

        return {
            "kind": self.kind,
            "quantities": list(self.quantities),
            "prices": list(self.prices),
            "profits": list(self.profits),
            "revenues": list(self.revenues),
            "revenue_total": self.revenues[0] + self.revenues[1],
            "quantity_profile": probs(self.quantity_profile, self.quantity_grid),
            "price_profiles": [
                {
                    "quantities": [float(self.quantity_grid[i]), float(self.quantity_grid[j])],
                    "profile": probs(pp, self.price_grid),
                }
                for (i, j), pp in sorted(self.price_profiles.items())
            ],
            "diagnostics": dict(self.diagnostics),
        }


def resolve_threads(threads: int | str | None) -> int:
    if threads in (None, "auto"):
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"thread count must be positive, got {threads}")
    return threads


def _expected(matrix: np.ndarray, profile: MixedProfile) -> float:
    cell = profile.cell
    if cell is not None:
        return float(matrix[cell])
    return float(profile.row_probs @ matrix @ profile.col_probs)


def solve_two_stage(config: MarketConfig, grid: StrategyGrid, threads: int | str | None = 1) -> EquilibriumResult:
    """Subgame-perfect equilibrium: solve every price subgame, then the capacity game."""
    _require_duopoly(config)
    qs = grid.quantities()
    ps = grid.prices()
    cells = [(i, j) for i in range(len(qs)) for j in range(len(qs))]

    def solve_cell(cell: tuple[int, int]) -> Equilibrium:
        q = (float(qs[cell[0]]), float(qs[cell[1]]))
        try:
            return solve_subgame(build_price_subgame(config, q, grid))
        except (SolverError, RuntimeError) as exc:
            raise SolverError(f"price subgame at quantities {q} failed: {exc}") from exc

    workers = resolve_threads(threads)
    if workers == 1:
        solutions = [solve_cell(c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solutions = list(pool.map(solve_cell, cells))

    v1 = np.empty((len(qs), len(qs)))
    v2 = np.empty_like(v1)
    for (i, j), eq in zip(cells, solutions):
        v1[i, j], v2[i, j] = eq.payoffs
    labels = tuple(qs.tolist())
    q_game = BimatrixGame(v1, v2, labels, labels)
    q_eq = solve_subgame(q_game)
    qp = q_eq.profile

    price_profiles = {}
    revenues = np.zeros(2)
    for i in qp.row_support:
        for j in qp.col_support:
            sub_eq = solutions[i * len(qs) + j]
            price_profiles[(i, j)] = sub_eq.profile
            r1, r2 = price_subgame_revenues(config, (qs[i], qs[j]), ps)
            w = qp.row_probs[i] * qp.col_probs[j]
            revenues += w * np.array([_expected(r1, sub_eq.profile), _expected(r2, sub_eq.profile)])

    n_mixed = sum(not s.is_pure for s in solutions)
    diagnostics = {
        "subgames": len(solutions),
        "pure_subgames": len(solutions) - n_mixed,
        "mixed_subgames": n_mixed,
        "subgame_selection_events": sum(s.alternatives > 0 for s in solutions),
        "subgame_discarded_equilibria": sum(s.alternatives for s in solutions),
        "quantity_stage": "pure" if qp.is_pure else "mixed",
        "quantity_discarded_equilibria": q_eq.alternatives,
    }
    return EquilibriumResult(
        quantity_grid=qs,
        price_grid=ps,
        quantity_profile=qp,
        price_profiles=price_profiles,
        profits=(float(q_eq.payoffs[0]), float(q_eq.payoffs[1])),
        revenues=(float(revenues[0]), float(revenues[1])),
        diagnostics=diagnostics,
        quantity_game=q_game,
    )
