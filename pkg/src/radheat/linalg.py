"""Tridiagonal storage and the Thomas algorithm."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_RTOL = 1e-14


class SingularSystemError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class TriDiag:
    """Banded m x m matrix; ``lower[0]`` and ``upper[-1]`` are ignored."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        bands = [np.array(b, dtype=float) for b in (self.lower, self.diag, self.upper)]
        n = bands[1].size
        if n < 1 or any(b.shape != (n,) for b in bands):
            raise ValueError("bands must be 1-d arrays of equal nonzero length")
        bands[0][0] = 0.0
        bands[2][-1] = 0.0
        for name, b in zip(("lower", "diag", "upper"), bands):
            b.setflags(write=False)
            object.__setattr__(self, name, b)

    @property
    def dim(self) -> int:
        return self.diag.size

    def __add__(self, other: "TriDiag") -> "TriDiag":
        return TriDiag(self.lower + other.lower, self.diag + other.diag, self.upper + other.upper)

    def __rmul__(self, c: float) -> "TriDiag":
        return TriDiag(c * self.lower, c * self.diag, c * self.upper)

    __mul__ = __rmul__

    def transpose(self) -> "TriDiag":
        lower = np.concatenate(([0.0], self.upper[:-1]))
        upper = np.concatenate((self.lower[1:], [0.0]))
        return TriDiag(lower, self.diag, upper)

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.lower[1:] - self.upper[:-1]) <= atol))

    def to_dense(self) -> np.ndarray:
        n = self.dim
        out = np.diag(self.diag)
        if n > 1:
            out[np.arange(1, n), np.arange(n - 1)] = self.lower[1:]
            out[np.arange(n - 1), np.arange(1, n)] = self.upper[:-1]
        return out

    def quadratic_form(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ tridiag_matvec(self, x))

    def row_sums(self) -> np.ndarray:
        return self.lower + self.diag + self.upper


def tridiag_matvec(A: TriDiag, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise ValueError(f"dimension mismatch: matrix {A.dim}, vector {x.shape}")
    y = A.diag * x
    y[1:] += A.lower[1:] * x[:-1]
    y[:-1] += A.upper[:-1] * x[1:]
    return y


class ThomasFactorization:
    """LU factors of a tridiagonal matrix, reusable across right-hand sides.

    Elimination is unpivoted. A pivot smaller than ``PIVOT_RTOL`` times the
    magnitude of its row raises :class:`SingularSystemError`.
    """

    def __init__(self, A: TriDiag):
        lower = A.lower.tolist()
        diag = A.diag.tolist()
        upper = A.upper.tolist()
        n = len(diag)
        pivots = [0.0] * n
        ratios = [0.0] * n
        scale = np.maximum(np.maximum(np.abs(A.lower), np.abs(A.diag)), np.abs(A.upper)).tolist()
        p = diag[0]
        for i in range(n):
            if i > 0:
                ratios[i] = lower[i] / pivots[i - 1]
                p = diag[i] - ratios[i] * upper[i - 1]
            if not abs(p) > PIVOT_RTOL * scale[i]:
                raise SingularSystemError(f"pivot {p!r} at row {i} is numerically zero")
            pivots[i] = p
        self.n = n
        self._upper = upper
        self._pivots = pivots
        self._ratios = ratios

    @property
    def pivots(self) -> np.ndarray:
        return np.array(self._pivots)

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape != (self.n,):
            raise ValueError(f"dimension mismatch: matrix {self.n}, rhs {b.shape}")
        y = b.tolist()
        r, p, u = self._ratios, self._pivots, self._upper
        for i in range(1, self.n):
            y[i] -= r[i] * y[i - 1]
        y[-1] /= p[-1]
        for i in range(self.n - 2, -1, -1):
            y[i] = (y[i] - u[i] * y[i + 1]) / p[i]
        return np.array(y)


def thomas_solve(A: TriDiag, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (A.dim,):
        raise ValueError(f"dimension mismatch: matrix {A.dim}, rhs {b.shape}")
    return ThomasFactorization(A).solve(b)


def dense_solve(A: TriDiag, b) -> np.ndarray:
    """O(m^3) reference solve, used to cross-check :func:`thomas_solve`."""
    return np.linalg.solve(A.to_dense(), np.asarray(b, dtype=float))
