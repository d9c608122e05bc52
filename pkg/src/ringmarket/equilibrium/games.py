"""Finite two-player games: pure and mixed Nash equilibria and selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from ringmarket.equilibrium.lemke_howson import lemke_howson

PROB_TOL = 1e-12
INDIFFERENCE_TOL = 1e-9
SUPPORT_BUDGET = 4000


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class BimatrixGame:
    payoff_1: np.ndarray
    payoff_2: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    def __post_init__(self) -> None:
        a = np.array(self.payoff_1, dtype=float)
        b = np.array(self.payoff_2, dtype=float)
        if a.ndim != 2 or a.shape != b.shape or a.size == 0:
            raise ValueError("payoff matrices must be nonempty and share one 2-D shape")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("payoffs must be finite")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "payoff_1", a)
        object.__setattr__(self, "payoff_2", b)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "col_labels", tuple(self.col_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.payoff_1.shape

    @property
    def scale(self) -> float:
        return max(1.0, float(np.abs(self.payoff_1).max()), float(np.abs(self.payoff_2).max()))


@dataclass(frozen=True)
class MixedProfile:
    row_probs: np.ndarray
    col_probs: np.ndarray

    def __post_init__(self) -> None:
        for name in ("row_probs", "col_probs"):
            v = np.array(getattr(self, name), dtype=float)
            if v.ndim != 1 or np.any(v < 0) or abs(v.sum() - 1.0) > PROB_TOL:
                raise ValueError(f"{name} is not a probability vector: {v}")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def pure(cls, shape: tuple[int, int], row: int, col: int) -> MixedProfile:
        x = np.zeros(shape[0])
        y = np.zeros(shape[1])
        x[row] = 1.0
        y[col] = 1.0
        return cls(x, y)

    @property
    def row_support(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.row_probs).tolist())

    @property
    def col_support(self) -> tuple[int, ...]:
        return tuple(np.flatnonzero(self.col_probs).tolist())

    @property
    def is_pure(self) -> bool:
        return len(self.row_support) == 1 and len(self.col_support) == 1

    @property
    def cell(self) -> tuple[int, int] | None:
        if not self.is_pure:
            return None
        return self.row_support[0], self.col_support[0]

    def same_as(self, other: MixedProfile, tol: float = 1e-9) -> bool:
        return (
            self.row_probs.shape == other.row_probs.shape
            and self.col_probs.shape == other.col_probs.shape
            and np.allclose(self.row_probs, other.row_probs, rtol=0, atol=tol)
            and np.allclose(self.col_probs, other.col_probs, rtol=0, atol=tol)
        )


@dataclass(frozen=True)
class Equilibrium:
    profile: MixedProfile
    payoffs: tuple[float, float]
    alternatives: int = field(default=0, compare=False)

    @property
    def is_pure(self) -> bool:
        return self.profile.is_pure

    @property
    def total(self) -> float:
        return self.payoffs[0] + self.payoffs[1]


def expected_payoffs(game: BimatrixGame, profile: MixedProfile) -> tuple[float, float]:
    cell = profile.cell
    if cell is not None:
        return float(game.payoff_1[cell]), float(game.payoff_2[cell])
    x, y = profile.row_probs, profile.col_probs
    return float(x @ game.payoff_1 @ y), float(x @ game.payoff_2 @ y)


def pure_nash(game: BimatrixGame) -> list[tuple[int, int]]:
    """Cells where neither player gains strictly by a unilateral deviation."""
    return [tuple(cell) for cell in np.argwhere(_stable_cells(game)).tolist()]


def _stable_cells(game: BimatrixGame) -> np.ndarray:
    a, b = game.payoff_1, game.payoff_2
    return (a >= a.max(axis=0, keepdims=True)) & (b >= b.max(axis=1, keepdims=True))


def is_equilibrium(game: BimatrixGame, profile: MixedProfile, tol: float | None = None) -> bool:
    """Support indifference plus no profitable deviation, up to ``tol`` times the payoff scale."""
    if tol is None:
        tol = INDIFFERENCE_TOL
    tol = tol * game.scale
    x, y = profile.row_probs, profile.col_probs
    row_values = game.payoff_1 @ y
    col_values = x @ game.payoff_2
    for values, probs in ((row_values, x), (col_values, y)):
        support = probs > 0
        best = values.max()
        if np.any(np.abs(values[support] - best) > tol):
            return False
    return True


def _undominated(game: BimatrixGame) -> tuple[np.ndarray, np.ndarray]:
    """Iteratively drop strategies strictly dominated by another pure strategy."""
    rows = np.arange(game.shape[0])
    cols = np.arange(game.shape[1])
    while True:
        a = game.payoff_1[np.ix_(rows, cols)]
        b = game.payoff_2[np.ix_(rows, cols)]
        row_dominated = (a[:, None, :] > a[None, :, :]).all(axis=2).any(axis=0)
        col_dominated = (b.T[:, None, :] > b.T[None, :, :]).all(axis=2).any(axis=0)
        if not row_dominated.any() and not col_dominated.any():
            return rows, cols
        rows = rows[~row_dominated]
        cols = cols[~col_dominated]


def _indifferent_mix(m: np.ndarray) -> np.ndarray | None:
    """Mix over the columns of square ``m`` equalising every row's payoff."""
    k = m.shape[0]
    system = np.zeros((k + 1, k + 1))
    system[:k, :k] = m
    system[:k, k] = -1.0
    system[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)) or np.abs(system @ sol - rhs).max() > 1e-9:
        return None
    return sol[:k]


def _clean(v: np.ndarray) -> np.ndarray:
    v = np.where(v < PROB_TOL, 0.0, v)
    return v / v.sum()


def _support_enumeration(game: BimatrixGame, budget: int) -> list[MixedProfile]:
    m, n = game.shape
    a, b = game.payoff_1, game.payoff_2
    found: list[MixedProfile] = []
    spent = 0
    for k in range(1, min(m, n) + 1):
        cost = comb(m, k) * comb(n, k)
        if spent + cost > budget and k > 1:
            break
        spent += cost
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                y_s = _indifferent_mix(a[np.ix_(rows, cols)])
                if y_s is None or np.any(y_s < -PROB_TOL):
                    continue
                x_s = _indifferent_mix(b[np.ix_(rows, cols)].T)
                if x_s is None or np.any(x_s < -PROB_TOL):
                    continue
                x = np.zeros(m)
                y = np.zeros(n)
                x[list(rows)] = x_s
                y[list(cols)] = y_s
                profile = MixedProfile(_clean(x), _clean(y))
                if is_equilibrium(game, profile) and not any(profile.same_as(f) for f in found):
                    found.append(profile)
    return found


def _polish(game: BimatrixGame, x: np.ndarray, y: np.ndarray) -> MixedProfile:
    """Re-solve the indifference conditions on the supports found by pivoting."""
    raw = MixedProfile(_clean(x), _clean(y))
    rows, cols = list(raw.row_support), list(raw.col_support)
    a, b = game.payoff_1, game.payoff_2

    def solve(m: np.ndarray) -> np.ndarray:
        k_eq, k_var = m.shape
        system = np.zeros((k_eq + 1, k_var + 1))
        system[:k_eq, :k_var] = m
        system[:k_eq, k_var] = -1.0
        system[k_eq, :k_var] = 1.0
        rhs = np.zeros(k_eq + 1)
        rhs[k_eq] = 1.0
        return np.linalg.lstsq(system, rhs, rcond=None)[0][:k_var]

    y_s = solve(a[np.ix_(rows, cols)])
    x_s = solve(b[np.ix_(rows, cols)].T)
    if np.any(y_s < -PROB_TOL) or np.any(x_s < -PROB_TOL):
        return raw
    xp = np.zeros_like(x)
    yp = np.zeros_like(y)
    xp[rows] = x_s
    yp[cols] = y_s
    polished = MixedProfile(_clean(xp), _clean(yp))
    return polished if is_equilibrium(game, polished) else raw


def mixed_nash(game: BimatrixGame, budget: int = SUPPORT_BUDGET) -> list[MixedProfile]:
    """Mixed equilibria by support enumeration on the undominated subgame.

    Equal-size supports are tried in ascending size until the number of
    support pairs would exceed ``budget``. When that finds nothing (large or
    degenerate games) Lemke-Howson paths from every starting label are used.
    """
    rows, cols = _undominated(game)
    sub = BimatrixGame(game.payoff_1[np.ix_(rows, cols)], game.payoff_2[np.ix_(rows, cols)])
    found = _support_enumeration(sub, budget)
    if not found:
        m, n = sub.shape
        for label in range(m + n):
            x, y = lemke_howson(sub.payoff_1, sub.payoff_2, label)
            profile = _polish(sub, x, y)
            if is_equilibrium(sub, profile) and not any(profile.same_as(f) for f in found):
                found.append(profile)
    out = []
    for profile in found:
        x = np.zeros(game.shape[0])
        y = np.zeros(game.shape[1])
        x[rows] = profile.row_probs
        y[cols] = profile.col_probs
        out.append(MixedProfile(x, y))
    if not out:
        raise SolverError(f"no equilibrium found for a {game.shape[0]}x{game.shape[1]} game")
    return out


def _selection_key(eq: Equilibrium) -> tuple:
    p = eq.profile
    return (
        not eq.is_pure,
        -eq.total,
        abs(eq.payoffs[0] - eq.payoffs[1]),
        p.row_support,
        p.col_support,
        tuple((-p.row_probs).tolist()),
        tuple((-p.col_probs).tolist()),
    )


def select_equilibrium(candidates: Sequence[Equilibrium]) -> Equilibrium:
    """Pure before mixed, then highest joint payoff, then the most even split,
    then lowest strategy indices."""
    if not candidates:
        raise ValueError("no candidate equilibria to select from")
    best = min(candidates, key=_selection_key)
    return Equilibrium(best.profile, best.payoffs, alternatives=len(candidates) - 1)


def _select_pure(game: BimatrixGame, cells: np.ndarray) -> Equilibrium:
    # same ordering as _selection_key, vectorised over many pure cells
    v1 = game.payoff_1[cells[:, 0], cells[:, 1]]
    v2 = game.payoff_2[cells[:, 0], cells[:, 1]]
    order = np.lexsort((cells[:, 1], cells[:, 0], np.abs(v1 - v2), -(v1 + v2)))
    i, j = cells[order[0]]
    return Equilibrium(
        MixedProfile.pure(game.shape, int(i), int(j)),
        (float(game.payoff_1[i, j]), float(game.payoff_2[i, j])),
        alternatives=len(cells) - 1,
    )


def solve_subgame(game: BimatrixGame) -> Equilibrium:
    """Pure equilibria if any exist, otherwise mixed ones, then one is selected."""
    stable = _stable_cells(game)
    if stable.any():
        return _select_pure(game, np.argwhere(stable))
    candidates = [Equilibrium(p, expected_payoffs(game, p)) for p in mixed_nash(game)]
    return select_equilibrium(candidates)
