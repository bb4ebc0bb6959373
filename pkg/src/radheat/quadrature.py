"""Gauss-Legendre integration of x**(N-1)-weighted integrands."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


class InvalidIntervalError(ValueError):
    pass


@dataclass(frozen=True)
class GaussRule:
    points: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        """Highest polynomial degree integrated exactly."""
        return 2 * self.points.size - 1


@lru_cache(maxsize=None)
def gauss_rule(npts: int) -> GaussRule:
    if npts < 1:
        raise ValueError("need at least one Gauss point")
    x, w = np.polynomial.legendre.leggauss(npts)
    x.setflags(write=False)
    w.setflags(write=False)
    return GaussRule(x, w)


def exact_points(N: int, extra_degree: int = 2) -> int:
    """Points needed to integrate x**(N-1) times a polynomial of ``extra_degree`` exactly."""
    return max(1, math.ceil((N + extra_degree) / 2))


def weighted_monomial_integral(a: float, b: float, k: int) -> float:
    if a > b:
        raise InvalidIntervalError(f"a={a} > b={b}")
    return (b ** (k + 1) - a ** (k + 1)) / (k + 1)


def mapped_points(a, b, npts: int):
    """Gauss nodes and weights mapped to [a, b].

    ``a`` and ``b`` may be arrays of element endpoints; the result then has
    shape ``(len(a), npts)``.
    """
    rule = gauss_rule(npts)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[..., None] + half[..., None] * rule.points
    w = half[..., None] * rule.weights
    return x, w


def element_weighted_integral(a: float, b: float, N: int,
                              g: Callable[[np.ndarray], np.ndarray], npts: int) -> float:
    if not 0.0 <= a < b:
        raise InvalidIntervalError(f"need 0 <= a < b, got ({a}, {b})")
    x, w = mapped_points(a, b, npts)
    vals = np.broadcast_to(np.asarray(g(x), dtype=float), x.shape)
    return float(np.sum(w * x ** (N - 1) * vals))
