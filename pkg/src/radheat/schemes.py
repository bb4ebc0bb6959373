"""Linearly implicit backward-Euler steps for the symmetric and nonsymmetric schemes.

Both schemes solve (M + tau K) u^{n+1} = M u^n + tau F(u^n) each step:

* ``Sym``: x^{N-1}-weighted mass, x^{N-1}-weighted stiffness, x^{N-1}-weighted load.
* ``NonSym``: x-weighted mass, K = x-weighted stiffness + (2-N) * convection,
  x-weighted load.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import assembly
from .fields import NodalField
from .linalg import ThomasFactorization, TriDiag, tridiag_matvec
from .mesh import Mesh
from .nonlinearity import NonlinearitySpec
from .quadrature import mapped_points

VARIANTS = ("Sym", "NonSym")
INIT_STRATEGIES = ("interpolate", "ritzA", "ritzB", "weightedL2")
RITZ_POINTS = 8
TAU_RTOL = 1e-15


class IncompatibleBoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    N: int
    variant: str = "Sym"
    fspec: NonlinearitySpec = field(default_factory=NonlinearitySpec.zero)
    load_quad_pts: Optional[int] = None
    init_strategy: Optional[str] = None
    load_rule: str = "quadrature"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise assembly.InvalidDimensionError(f"N must be an integer >= 2, got {self.N}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.init_strategy is None:
            object.__setattr__(self, "init_strategy", "ritzA" if self.variant == "Sym" else "ritzB")
        if self.init_strategy not in INIT_STRATEGIES:
            raise ValueError(f"unknown initial-value strategy {self.init_strategy!r}")
        if self.load_rule not in assembly.LOAD_RULES:
            raise ValueError(f"unknown load rule {self.load_rule!r}")

    @property
    def weight_exponent(self) -> int:
        return self.N - 1 if self.variant == "Sym" else 1

    @property
    def quad_pts(self) -> int:
        return self.load_quad_pts if self.load_quad_pts is not None else assembly.load_points_default()


def scheme_matrices(mesh: Mesh, config: SchemeConfig) -> tuple[TriDiag, TriDiag]:
    """(mass, operator) pair of the configured scheme."""
    if config.variant == "Sym":
        return assembly.assemble_mass_sym(mesh, config.N), assembly.assemble_stiffness_sym(mesh, config.N)
    return assembly.assemble_mass_nonsym(mesh), assembly.assemble_B(mesh, config.N)


class StepperState:
    """Mutable stepping state: current field, time, and a factorization cached by tau."""

    def __init__(self, config: SchemeConfig, mesh: Mesh, u: NodalField, t: float = 0.0):
        if u.mesh != mesh:
            raise ValueError("initial field lives on a different mesh")
        self.config = config
        self.mesh = mesh
        self.mass, self.operator = scheme_matrices(mesh, config)
        self.u = u
        self.t = float(t)
        self._tau: Optional[float] = None
        self._factor: Optional[ThomasFactorization] = None
        self.system: Optional[TriDiag] = None

    def factorization(self, tau: float) -> ThomasFactorization:
        if self._tau is None or abs(tau - self._tau) > TAU_RTOL * self._tau:
            self.system = self.mass + tau * self.operator
            self._factor = ThomasFactorization(self.system)
            self._tau = tau
        return self._factor

    def rhs(self, tau: float) -> np.ndarray:
        cfg = self.config
        load = assembly.assemble_load(self.mesh, cfg.weight_exponent, cfg.fspec, self.u, cfg.quad_pts,
                                     rule=cfg.load_rule)
        return tridiag_matvec(self.mass, self.u.values) + tau * load

    def step(self, tau: float) -> NodalField:
        if not tau > 0:
            raise ValueError(f"time increment must be positive, got {tau}")
        new = self.factorization(tau).solve(self.rhs(tau))
        self.u = NodalField(self.mesh, new)
        self.t = self.t + tau
        return self.u


def step(state: StepperState, tau: float) -> NodalField:
    return state.step(tau)


def _derivative(w: Callable, x: np.ndarray, eps: float = 1e-4) -> np.ndarray:
    # fourth-order central difference
    return (8.0 * (w(x + eps) - w(x - eps)) - (w(x + 2 * eps) - w(x - 2 * eps))) / (12.0 * eps)


def ritz_rhs(mesh: Mesh, N: int, variant: str, w: Callable, dw: Optional[Callable] = None,
             npts: int = RITZ_POINTS) -> np.ndarray:
    """Vector A(w, phi_j) (variant "A") or B(w, phi_j) (variant "B")."""
    if variant not in ("A", "B"):
        raise ValueError("Ritz variant must be 'A' or 'B'")
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    x, wq = mapped_points(a, b, npts)
    h = (b - a)[:, None]
    wx = dw(x) if dw is not None else _derivative(w, x)
    wx = np.asarray(wx, dtype=float)
    dpsi = (-1.0 / h, 1.0 / h)
    if variant == "A":
        dens = wq * x ** (N - 1) * wx
        contrib = [np.sum(dens * d, axis=1) for d in dpsi]
    else:
        dens = wq * x * wx
        psi = ((b[:, None] - x) / h, (x - a[:, None]) / h)
        contrib = [np.sum(dens * d + (2.0 - N) * wq * wx * p, axis=1) for d, p in zip(dpsi, psi)]
    r = contrib[0].copy()
    r[1:] += contrib[1][:-1]
    return r


def ritz_operator(mesh: Mesh, N: int, variant: str) -> TriDiag:
    if variant == "A":
        return assembly.assemble_stiffness_sym(mesh, N)
    if variant == "B":
        return assembly.assemble_B(mesh, N)
    raise ValueError("Ritz variant must be 'A' or 'B'")


def ritz_projection(mesh: Mesh, N: int, variant: str, w: Callable,
                    dw: Optional[Callable] = None) -> NodalField:
    """Element of S_h whose error against ``w`` is orthogonal to S_h in the A- or B-form.

    ``dw`` is the derivative of ``w``; when omitted a fourth-order finite
    difference is used.
    """
    K = ritz_operator(mesh, N, variant)
    r = ritz_rhs(mesh, N, variant, w, dw)
    return NodalField(mesh, ThomasFactorization(K).solve(r))


def ritz_residual(p: NodalField, N: int, variant: str, w: Callable,
                  dw: Optional[Callable] = None) -> np.ndarray:
    """Galerkin residual form(p - w, phi_j) for every free node j."""
    K = ritz_operator(p.mesh, N, variant)
    return tridiag_matvec(K, p.values) - ritz_rhs(p.mesh, N, variant, w, dw)


def weighted_l2_projection(mesh: Mesh, weight_exponent: int, u0: Callable,
                           npts: int = RITZ_POINTS) -> NodalField:
    M = assembly.weighted_mass(mesh, weight_exponent)
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    x, wq = mapped_points(a, b, npts)
    h = (b - a)[:, None]
    dens = wq * x ** weight_exponent * np.asarray(u0(x), dtype=float)
    r = np.sum(dens * (b[:, None] - x) / h, axis=1)
    r[1:] += np.sum(dens * (x - a[:, None]) / h, axis=1)[:-1]
    return NodalField(mesh, ThomasFactorization(M).solve(r))


def initialize(mesh: Mesh, config: SchemeConfig, u0: Callable,
               du0: Optional[Callable] = None) -> NodalField:
    """Discrete initial value u_h^0 built from ``u0`` by the configured strategy."""
    edge = float(np.asarray(u0(np.array([1.0])), dtype=float).ravel()[0])
    if not math.isfinite(edge) or abs(edge) > 1e-12:
        raise IncompatibleBoundaryError(f"initial value must vanish at x=1, got u0(1)={edge}")
    strategy = config.init_strategy
    if strategy == "interpolate":
        return NodalField.interpolate(mesh, u0)
    if strategy == "ritzA":
        return ritz_projection(mesh, config.N, "A", u0, du0)
    if strategy == "ritzB":
        return ritz_projection(mesh, config.N, "B", u0, du0)
    return weighted_l2_projection(mesh, config.weight_exponent, u0)


def with_variant(config: SchemeConfig, variant: str) -> SchemeConfig:
    init = config.init_strategy
    if init in ("ritzA", "ritzB"):
        init = None
    return replace(config, variant=variant, init_strategy=init)
