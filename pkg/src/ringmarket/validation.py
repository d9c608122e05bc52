"""Built-in oracle checks run by ``ringmarket validate``."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ringmarket.equilibrium import (
    BimatrixGame,
    StrategyGrid,
    is_equilibrium,
    mixed_nash,
    pure_nash,
    solve_subgame,
    solve_two_stage,
)
from ringmarket.market import MarketConfig
from ringmarket.taxation import TaxKind, TaxScheme


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def cournot_benchmark(u: float, n_buyers: int, cost: float) -> tuple[float, float]:
    """Per-firm quantity and profit of the symmetric Cournot duopoly with inverse demand u - Q/n."""
    q = n_buyers * (u - cost) / 3
    return q, n_buyers * (u - cost) ** 2 / 9


def check_cournot(config: MarketConfig, grid: StrategyGrid, threads=1, profit_rtol: float = 0.05) -> Check:
    cost = config.costs[0]
    untaxed = replace(config, tax=TaxScheme(TaxKind.NONE), costs=(cost, cost))
    q_star, profit_star = cournot_benchmark(config.u, config.geography.n_buyers, cost)
    result = solve_two_stage(untaxed, grid, threads=threads)
    q1, q2 = result.quantities
    ok_q = abs(q1 - q_star) <= grid.q_step + 1e-9 and abs(q2 - q_star) <= grid.q_step + 1e-9
    ok_p = all(abs(p - profit_star) <= profit_rtol * abs(profit_star) for p in result.profits)
    return Check(
        "cournot_benchmark",
        ok_q and ok_p,
        f"q=({q1:g}, {q2:g}) vs {q_star:g}; profits=({result.profits[0]:.4f}, {result.profits[1]:.4f}) vs {profit_star:.4f}",
    )


def check_lambda_zero(config: MarketConfig, grid: StrategyGrid, threads=1) -> Check:
    reference = solve_two_stage(replace(config, tax=TaxScheme(TaxKind.NONE)), grid, threads=threads).to_dict()
    same = []
    for kind in (TaxKind.CARDINAL, TaxKind.ORDINAL):
        other = solve_two_stage(replace(config, tax=TaxScheme(kind, 0.0, config.tax.gamma)), grid, threads=threads)
        same.append(other.to_dict() == reference)
    return Check("lambda_zero_equivalence", all(same), f"cardinal={same[0]}, ordinal={same[1]}")


def no_profitable_deviation(game: BimatrixGame, cell: tuple[int, int]) -> bool:
    i, j = cell
    return game.payoff_1[i, j] >= game.payoff_1[:, j].max() and game.payoff_2[i, j] >= game.payoff_2[i, :].max()


def check_textbook_games() -> list[Check]:
    pd = BimatrixGame([[3, 0], [5, 1]], [[3, 5], [0, 1]])
    pennies = BimatrixGame([[1, -1], [-1, 1]], [[-1, 1], [1, -1]])
    sexes = BimatrixGame([[2, 0], [0, 1]], [[1, 0], [0, 2]])
    pd_eq = solve_subgame(pd)
    mp = solve_subgame(pennies).profile
    bos = [p for p in mixed_nash(sexes) if not p.is_pure]
    bos_ok = len(bos) == 1 and np.allclose(bos[0].row_probs, [2 / 3, 1 / 3], atol=1e-12) and np.allclose(
        bos[0].col_probs, [1 / 3, 2 / 3], atol=1e-12
    )
    return [
        Check("prisoners_dilemma", pd_eq.profile.cell == (1, 1) and pd_eq.payoffs == (1.0, 1.0), f"cell={pd_eq.profile.cell}"),
        Check(
            "matching_pennies",
            pure_nash(pennies) == [] and np.allclose(mp.row_probs, 0.5, atol=1e-12) and np.allclose(mp.col_probs, 0.5, atol=1e-12),
            f"row={mp.row_probs.tolist()}, col={mp.col_probs.tolist()}",
        ),
        Check("battle_of_the_sexes", bos_ok, f"mixed={[(p.row_probs.tolist(), p.col_probs.tolist()) for p in bos]}"),
    ]


def check_random_games(n_games: int = 100, size: int = 4, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(n_games):
        game = BimatrixGame(rng.integers(-10, 11, (size, size)), rng.integers(-10, 11, (size, size)))
        for cell in pure_nash(game):
            failures += not no_profitable_deviation(game, cell)
        for profile in mixed_nash(game):
            failures += not is_equilibrium(game, profile)
    return Check("random_games", failures == 0, f"{n_games} games of size {size}x{size}, {failures} failures")


def run_checks(config: MarketConfig, grid: StrategyGrid, threads=1) -> list[Check]:
    return [
        check_cournot(config, grid, threads),
        check_lambda_zero(config, grid, threads),
        *check_textbook_games(),
        check_random_games(),
    ]


__all__ = ["Check", "cournot_benchmark", "no_profitable_deviation", "run_checks"]
