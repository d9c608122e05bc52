from fractions import Fraction

import pytest

from ringmarket import MarketConfig, TaxScheme, canonical_arrangement
from ringmarket.equilibrium import StrategyGrid


def exact_allocation(config: MarketConfig, quantities, prices):
    """Loop-by-loop allocation in exact rational arithmetic, used as an oracle."""
    mult = [[Fraction(float(m)) for m in row] for row in config.multipliers]
    ranks = config.geography.rank_matrix.tolist()
    u = Fraction(config.u)
    n_buyers, n_firms = len(mult), len(prices)
    eff = [[Fraction(float(prices[f])) * mult[b][f] for f in range(n_firms)] for b in range(n_buyers)]
    order = [sorted(range(n_firms), key=lambda f: (eff[b][f], ranks[b][f])) for b in range(n_buyers)]
    capacity = [Fraction(float(q)) for q in quantities]
    held = [Fraction(0)] * n_buyers
    alloc = [[Fraction(0)] * n_firms for _ in range(n_buyers)]
    for step in range(n_firms):
        want = [max(Fraction(0), u - eff[b][order[b][step]] - held[b]) for b in range(n_buyers)]
        for f in range(n_firms):
            buyers = [b for b in range(n_buyers) if order[b][step] == f]
            asked = sum((want[b] for b in buyers), Fraction(0))
            scale = capacity[f] / asked if asked > capacity[f] else Fraction(1)
            for b in buyers:
                got = want[b] * scale
                alloc[b][f] += got
                held[b] += got
                capacity[f] -= got
    return alloc


@pytest.fixture
def canonical():
    return canonical_arrangement()


@pytest.fixture
def untaxed(canonical):
    return MarketConfig(canonical, TaxScheme("none"), 120.0, (100.0, 100.0))


@pytest.fixture
def small_grid():
    return StrategyGrid(q_min=40, q_max=100, q_step=10, p_min=100, p_max=115, p_step=5 / 6)
