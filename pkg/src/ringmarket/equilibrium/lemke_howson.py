"""Lemke-Howson complementary pivoting with a lexicographic ratio test."""

from __future__ import annotations

import numpy as np

MAX_PIVOTS = 100_000


def _leaving_row(tableau: np.ndarray, column: int, slack_cols: list[int]) -> int:
    col = tableau[:, column]
    candidates = np.flatnonzero(col > 1e-12)
    if candidates.size == 0:
        raise RuntimeError("unbounded pivot column in Lemke-Howson")
    # lexicographic minimum ratio: rhs first, then the initial-basis columns
    for c in [-1, *slack_cols]:
        ratios = tableau[candidates, c] / col[candidates]
        best = ratios.min()
        candidates = candidates[ratios <= best + 1e-11 * max(1.0, abs(best))]
        if candidates.size == 1:
            break
    return int(candidates[0])


def _pivot(tableau: np.ndarray, row: int, column: int) -> None:
    tableau[row] /= tableau[row, column]
    factors = tableau[:, column].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


def lemke_howson(payoff_1: np.ndarray, payoff_2: np.ndarray, initial_label: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Follow the path that drops ``initial_label``; returns normalised (x, y) mixes.

    Labels 0..m-1 belong to row strategies and m..m+n-1 to column strategies.
    """
    a = np.asarray(payoff_1, dtype=float)
    b = np.asarray(payoff_2, dtype=float)
    m, n = a.shape
    if not 0 <= initial_label < m + n:
        raise ValueError(f"initial label {initial_label} out of range")
    a = a - a.min() + 1.0
    b = b - b.min() + 1.0

    # row player's polytope {x >= 0, B^T x <= 1}; columns are labels then rhs
    tab_x = np.zeros((n, m + n + 1))
    tab_x[:, :m] = b.T
    tab_x[:, m:m + n] = np.eye(n)
    tab_x[:, -1] = 1.0
    basis_x = list(range(m, m + n))
    slack_x = list(range(m, m + n))

    # column player's polytope {y >= 0, A y <= 1}
    tab_y = np.zeros((m, m + n + 1))
    tab_y[:, :m] = np.eye(m)
    tab_y[:, m:m + n] = a
    tab_y[:, -1] = 1.0
    basis_y = list(range(m))
    slack_y = list(range(m))

    sides = {True: (tab_x, basis_x, slack_x), False: (tab_y, basis_y, slack_y)}
    on_x = initial_label < m
    entering = initial_label
    for _ in range(MAX_PIVOTS):
        tab, basis, slack = sides[on_x]
        row = _leaving_row(tab, entering, slack)
        _pivot(tab, row, entering)
        leaving = basis[row]
        basis[row] = entering
        if leaving == initial_label:
            break
        entering = leaving
        on_x = not on_x
    else:
        raise RuntimeError("Lemke-Howson did not terminate")

    x = np.zeros(m)
    y = np.zeros(n)
    for r, label in enumerate(basis_x):
        if label < m:
            x[label] = tab_x[r, -1]
    for r, label in enumerate(basis_y):
        if label >= m:
            y[label - m] = tab_y[r, -1]
    x = np.maximum(x, 0.0)
    y = np.maximum(y, 0.0)
    return x / x.sum(), y / y.sum()
