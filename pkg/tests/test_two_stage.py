from dataclasses import replace

import numpy as np
import pytest

from conftest import exact_allocation
from ringmarket import MarketConfig, TaxScheme, allocate
from ringmarket.equilibrium import (
    BimatrixGame,
    SolverError,
    StrategyGrid,
    build_price_subgame,
    is_equilibrium,
    solve_subgame,
    solve_two_stage,
)
from ringmarket.equilibrium import two_stage
from ringmarket.equilibrium.grid import grid_points
from ringmarket.geography import Geography
from ringmarket.validation import no_profitable_deviation


def test_grid_points_inclusive():
    assert grid_points(0, 160, 5).tolist()[-1] == 160
    assert len(grid_points(0, 160, 5)) == 33
    assert grid_points(90, 120, 0.5)[-1] == 120
    assert grid_points(1, 2, 0.3).tolist() == pytest.approx([1, 1.3, 1.6, 1.9])
    assert grid_points(3, 3, 1).tolist() == [3]


def test_default_grid():
    grid = StrategyGrid()
    assert len(grid.quantities()) == 33
    prices = grid.prices()
    assert prices[0] == 90 and prices[-1] == pytest.approx(120) and len(prices) == 73
    # the untaxed market-clearing price 120 - Q/12 of any grid pair is a grid price
    for total in np.arange(0, 325, 5):
        clearing = 120 - total / 12
        if 90 <= clearing <= 120:
            assert np.min(np.abs(prices - clearing)) < 1e-9


@pytest.mark.parametrize(
    "kwargs",
    [dict(q_step=0), dict(p_step=-1), dict(q_min=10, q_max=5), dict(p_min=-1)],
)
def test_grid_invariants(kwargs):
    with pytest.raises(ValueError):
        StrategyGrid(**kwargs)


def test_single_cell_subgame(untaxed):
    grid = StrategyGrid(q_min=50, q_max=50, q_step=1, p_min=105, p_max=105, p_step=1)
    game = build_price_subgame(untaxed, (50, 60), grid)
    out = allocate(untaxed, (50, 60), (105, 105))
    assert game.shape == (1, 1)
    assert game.payoff_1[0, 0] == out.profit[0] and game.payoff_2[0, 0] == out.profit[1]


def test_zero_capacity_subgame_is_all_zero(untaxed):
    game = build_price_subgame(untaxed, (0, 0), StrategyGrid())
    assert not game.payoff_1.any() and not game.payoff_2.any()


def test_subgame_cells_match_direct_evaluation(untaxed):
    grid = StrategyGrid(p_min=100, p_max=112, p_step=6)
    game = build_price_subgame(untaxed, (80, 80), grid)
    assert game.shape == (3, 3)
    for a, pa in enumerate((100, 106, 112)):
        for b, pb in enumerate((100, 106, 112)):
            out = allocate(untaxed, (80, 80), (pa, pb))
            assert game.payoff_1[a, b] == out.profit[0]
            assert game.payoff_2[a, b] == out.profit[1]
            exact = exact_allocation(untaxed, (80, 80), (pa, pb))
            sold = [float(sum(row[f] for row in exact)) for f in range(2)]
            assert game.payoff_1[a, b] == pytest.approx(pa * sold[0] - 8000, abs=1e-9)
            assert game.payoff_2[a, b] == pytest.approx(pb * sold[1] - 8000, abs=1e-9)


def _certify(config, grid, result):
    """Re-solve every subgame independently and check both stages."""
    qs = grid.quantities()
    v1 = np.empty((len(qs), len(qs)))
    v2 = np.empty_like(v1)
    for i, qa in enumerate(qs):
        for j, qb in enumerate(qs):
            game = build_price_subgame(config, (qa, qb), grid)
            eq = solve_subgame(game)
            assert is_equilibrium(game, eq.profile)
            if eq.is_pure:
                assert no_profitable_deviation(game, eq.profile.cell)
            v1[i, j], v2[i, j] = eq.payoffs
    q_game = BimatrixGame(v1, v2)
    assert np.array_equal(q_game.payoff_1, result.quantity_game.payoff_1)
    assert np.array_equal(q_game.payoff_2, result.quantity_game.payoff_2)
    assert is_equilibrium(q_game, result.quantity_profile)
    if result.quantity_profile.is_pure:
        assert no_profitable_deviation(q_game, result.quantity_profile.cell)


@pytest.mark.parametrize("kind", ["none", "cardinal", "ordinal"])
@pytest.mark.parametrize("costs", [(100, 100), (99, 100)])
def test_two_stage_certificates(canonical, small_grid, kind, costs):
    config = MarketConfig(canonical, TaxScheme(kind, 0.1), costs=costs)
    result = solve_two_stage(config, small_grid)
    _certify(config, small_grid, result)
    for q in result.quantities:
        assert np.min(np.abs(small_grid.quantities() - q)) < 1e-12 or result.kind == "mixed_quantity"


def test_profits_match_reevaluation(canonical, small_grid):
    config = MarketConfig(canonical, TaxScheme("cardinal", 0.1), costs=(99, 100))
    result = solve_two_stage(config, small_grid)
    qs, ps = small_grid.quantities(), small_grid.prices()
    qp = result.quantity_profile
    profits = np.zeros(2)
    revenues = np.zeros(2)
    for (i, j), pp in result.price_profiles.items():
        for a in pp.row_support:
            for b in pp.col_support:
                w = qp.row_probs[i] * qp.col_probs[j] * pp.row_probs[a] * pp.col_probs[b]
                out = allocate(config, (qs[i], qs[j]), (ps[a], ps[b]))
                profits += w * out.profit
                revenues += w * out.revenue
    assert np.allclose(result.profits, profits, rtol=0, atol=1e-9)
    assert np.allclose(result.revenues, revenues, rtol=0, atol=1e-9)


@pytest.mark.parametrize("kind", ["none", "ordinal"])
def test_symmetric_configuration_gives_symmetric_equilibrium(canonical, small_grid, kind):
    result = solve_two_stage(MarketConfig(canonical, TaxScheme(kind, 0.1)), small_grid)
    q1, q2 = result.quantities
    assert q1 == q2
    assert result.profits[0] == result.profits[1]


def test_thread_count_does_not_change_result(canonical, small_grid):
    config = MarketConfig(canonical, TaxScheme("cardinal", 0.1), costs=(99, 100))
    one = solve_two_stage(config, small_grid, threads=1)
    many = solve_two_stage(config, small_grid, threads=4)
    assert one.to_dict() == many.to_dict()
    assert np.array_equal(one.quantity_game.payoff_1, many.quantity_game.payoff_1)


@pytest.mark.parametrize("kind", ["cardinal", "ordinal"])
def test_zero_lambda_reduces_to_untaxed(canonical, small_grid, kind):
    base = solve_two_stage(MarketConfig(canonical, TaxScheme("none"), costs=(99, 100)), small_grid)
    other = solve_two_stage(MarketConfig(canonical, TaxScheme(kind, 0.0), costs=(99, 100)), small_grid)
    assert other.to_dict() == base.to_dict()


def test_price_refinement_is_smaller_than_quantity_step(untaxed):
    coarse = StrategyGrid(q_min=60, q_max=100, q_step=5)
    fine = replace(coarse, p_step=coarse.p_step / 2)
    a = solve_two_stage(untaxed, coarse)
    b = solve_two_stage(untaxed, fine)
    i = int(np.argmin(np.abs(coarse.quantities() - a.quantities[0])))
    one_step = abs(a.quantity_game.payoff_1[i, i] - a.quantity_game.payoff_1[i - 1, i])
    assert abs(a.profits[0] - b.profits[0]) < one_step


def test_solver_failure_names_quantities(untaxed, small_grid, monkeypatch):
    def boom(game):
        raise SolverError("no equilibrium")

    monkeypatch.setattr(two_stage, "solve_subgame", boom)
    with pytest.raises(SolverError, match=r"quantities \(40\.0, 40\.0\)"):
        solve_two_stage(untaxed, small_grid)


def test_more_than_two_firms_rejected(small_grid):
    geo = Geography(1.0, (0.0, 0.3, 0.6), (0.1,))
    with pytest.raises(ValueError):
        solve_two_stage(MarketConfig(geo, costs=(1, 1, 1)), small_grid)


def test_result_reporting(canonical, small_grid):
    result = solve_two_stage(MarketConfig(canonical), small_grid)
    d = result.to_dict()
    assert d["kind"] == result.kind
    assert d["diagnostics"]["subgames"] == len(small_grid.quantities()) ** 2
    assert d["diagnostics"]["pure_subgames"] + d["diagnostics"]["mixed_subgames"] == d["diagnostics"]["subgames"]
    assert d["revenue_total"] == pytest.approx(sum(result.revenues))


@pytest.mark.parametrize("q", [(700, 700), (900, 500)])
def test_edgeworth_region_mixed_price_equilibrium(canonical, q):
    # capacities far above the revenue-maximising level leave no pure price equilibrium
    config = MarketConfig(canonical, costs=(0, 0))
    game = build_price_subgame(config, q, StrategyGrid(p_min=0, p_max=120, p_step=2))
    eq = solve_subgame(game)
    assert not eq.is_pure
    assert is_equilibrium(game, eq.profile)
    x, y = eq.profile.row_probs, eq.profile.col_probs
    row_values = game.payoff_1 @ y
    assert np.ptp(row_values[x > 0]) <= 1e-9 * game.scale


def test_half_unit_price_step_misses_cournot_profit(untaxed):
    # 80 units per firm clear at 106.67, which a 0.5 price grid cannot post;
    # the nearest on-grid outcome overshoots the Cournot profit by 5.5%
    coarse = solve_two_stage(untaxed, StrategyGrid(q_min=60, q_max=100, p_step=0.5))
    assert coarse.quantities == (75.0, 75.0) and coarse.profits == (562.5, 562.5)
    fine = solve_two_stage(untaxed, StrategyGrid(q_min=60, q_max=100))
    assert fine.quantities == (80.0, 80.0)
    assert fine.profits[0] == pytest.approx(1600 / 3, rel=1e-12)
