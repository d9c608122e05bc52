"""Compiled two-firm allocation; mirrors ``market.allocate_reference`` operation for operation."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sorted_sum(values, buf):
    # insertion sort into buf, then left-to-right sum
    n = values.size
    for i in range(n):
        v = values[i]
        j = i
        while j > 0 and buf[j - 1] > v:
            buf[j] = buf[j - 1]
            j -= 1
        buf[j] = v
    total = 0.0
    for i in range(n):
        total = total + buf[i]
    return total


@njit(cache=True, nogil=True)
def _ration(request, capacity, buf):
    asked = _sorted_sum(request, buf)
    if asked > capacity:
        scale = capacity / asked
        for b in range(request.size):
            request[b] = request[b] * scale


@njit(cache=True, nogil=True)
def _cap(column, capacity, buf):
    s = _sorted_sum(column, buf)
    rounds = 0
    while s > capacity:
        factor = np.nextafter(capacity / s, 0.0)
        if rounds > 0:
            factor = factor * max(1.0 - 2.0 ** (rounds - 53.0), 0.0)
        rounds += 1
        for b in range(column.size):
            column[b] = column[b] * factor
        s = _sorted_sum(column, buf)
    return s


@njit(cache=True, nogil=True)
def allocate_two(prices, multipliers, home0, q0, q1, u):
    n_profiles = prices.shape[0]
    n_buyers = multipliers.shape[0]
    alloc = np.zeros((n_profiles, n_buyers, 2))
    sold = np.zeros((n_profiles, 2))
    first0 = np.empty(n_buyers, dtype=np.bool_)
    e0 = np.empty(n_buyers)
    e1 = np.empty(n_buyers)
    got0 = np.empty(n_buyers)
    got1 = np.empty(n_buyers)
    req0 = np.empty(n_buyers)
    req1 = np.empty(n_buyers)
    buf = np.empty(n_buyers)
    for n in range(n_profiles):
        for b in range(n_buyers):
            e0[b] = prices[n, 0] * multipliers[b, 0]
            e1[b] = prices[n, 1] * multipliers[b, 1]
            first0[b] = e0[b] < e1[b] or (e0[b] == e1[b] and home0[b])
            want = max(0.0, u - (e0[b] if first0[b] else e1[b]))
            got0[b] = want if first0[b] else 0.0
            got1[b] = 0.0 if first0[b] else want
        _ration(got0, q0, buf)
        _ration(got1, q1, buf)
        left0 = max(q0 - _sorted_sum(got0, buf), 0.0)
        left1 = max(q1 - _sorted_sum(got1, buf), 0.0)
        # second visit: firm 0 customers now try firm 1 and vice versa
        for b in range(n_buyers):
            held = got0[b] + got1[b]
            if first0[b]:
                req1[b] = max(0.0, (u - e1[b]) - held)
                req0[b] = 0.0
            else:
                req0[b] = max(0.0, (u - e0[b]) - held)
                req1[b] = 0.0
        _ration(req0, left0, buf)
        _ration(req1, left1, buf)
        for b in range(n_buyers):
            got0[b] = got0[b] + req0[b]
            got1[b] = got1[b] + req1[b]
        sold[n, 0] = _cap(got0, q0, buf)
        sold[n, 1] = _cap(got1, q1, buf)
        for b in range(n_buyers):
            alloc[n, b, 0] = got0[b]
            alloc[n, b, 1] = got1[b]
    return alloc, sold
