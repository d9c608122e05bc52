from ringmarket.equilibrium.games import (
    BimatrixGame,
    Equilibrium,
    MixedProfile,
    SolverError,
    expected_payoffs,
    is_equilibrium,
    mixed_nash,
    pure_nash,
    select_equilibrium,
    solve_subgame,
)
from ringmarket.equilibrium.grid import StrategyGrid
from ringmarket.equilibrium.two_stage import EquilibriumResult, build_price_subgame, solve_two_stage

__all__ = [
    "BimatrixGame",
    "Equilibrium",
    "EquilibriumResult",
    "MixedProfile",
    "SolverError",
    "StrategyGrid",
    "build_price_subgame",
    "expected_payoffs",
    "is_equilibrium",
    "mixed_nash",
    "pure_nash",
    "select_equilibrium",
    "solve_subgame",
    "solve_two_stage",
]
