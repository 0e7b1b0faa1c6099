"""Bracketing scalar solvers shared by the bargaining code."""

from __future__ import annotations

import math
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def bisect_increasing(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    max_iter: int = 2000,
) -> Tuple[float, float]:
    """Root of a nondecreasing function on ``[lo, hi]``.

    Assumes ``func(lo) <= 0 <= func(hi)``. Returns the bracket ``(lo, hi)``
    after it has shrunk to ``xtol`` (or stopped shrinking in floating
    point); the root lies in the returned interval.
    """
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if func(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def golden_max(
    func: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
) -> Tuple[float, float]:
    """Maximize a unimodal function on ``[a, b]`` by golden-section search.

    Returns ``(x, func(x))`` for the best point probed once the bracket is
    no wider than ``tol``.
    """
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, func(x)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc = func(c)
    fd = func(d)
    for _ in range(n):
        if fc > fd:
            b, d, fd = d, c, fc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            h *= INV_PHI
            d = a + INV_PHI * h
            fd = func(d)
    return (c, fc) if fc > fd else (d, fd)
