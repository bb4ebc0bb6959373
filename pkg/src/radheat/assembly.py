"""Element-by-element assembly of the weighted P1 forms.

Row index = test function, column index = trial function, both over the free
nodes 0..m-1. Element e spans [x_e, x_{e+1}]; its right node is dropped when
e + 1 == m (Dirichlet).
"""
from __future__ import annotations

import os

import numpy as np

from .fields import NodalField
from .linalg import TriDiag, tridiag_matvec
from .mesh import Mesh
from .nonlinearity import NonlinearitySpec
from .quadrature import exact_points, mapped_points

DEFAULT_LOAD_POINTS = 5
LOAD_RULES = ("quadrature", "interpolated")


class InvalidDimensionError(ValueError):
    pass


def load_points_default() -> int:
    """Load quadrature order, overridable through ``RADHEAT_QUAD_PTS``."""
    env = os.environ.get("RADHEAT_QUAD_PTS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("RADHEAT_QUAD_PTS must be a positive integer")
        return n
    return DEFAULT_LOAD_POINTS


def _check_dim(N):
    if int(N) != N or N < 2:
        raise InvalidDimensionError(f"dimension N must be an integer >= 2, got {N}")


def _gather(mesh: Mesh, local: np.ndarray) -> TriDiag:
    """Sum element matrices ``local[e] = [[LL, LR], [RL, RR]]`` into the free-node bands."""
    m = mesh.m
    lower = np.zeros(m)
    diag = np.zeros(m)
    upper = np.zeros(m)
    diag += local[:, 0, 0]
    diag[1:] += local[:-1, 1, 1]
    upper[:-1] = local[:-1, 0, 1]
    lower[1:] = local[:-1, 1, 0]
    return TriDiag(lower, diag, upper)


def _element_data(mesh: Mesh, npts: int):
    a, b = mesh.nodes[:-1], mesh.nodes[1:]
    x, w = mapped_points(a, b, npts)
    h = (b - a)[:, None]
    psi = np.stack(((b[:, None] - x) / h, (x - a[:, None]) / h))  # (2, m, npts)
    dpsi = np.stack((-1.0 / h, 1.0 / h))  # (2, m, 1)
    return x, w, psi, dpsi


def weighted_mass(mesh: Mesh, weight_exponent: int) -> TriDiag:
    x, w, psi, _ = _element_data(mesh, exact_points(weight_exponent + 1))
    wx = w * x ** weight_exponent
    local = np.einsum("nq,inq,jnq->nij", wx, psi, psi)
    return _gather(mesh, local)


def weighted_stiffness(mesh: Mesh, weight_exponent: int) -> TriDiag:
    x, w, _, dpsi = _element_data(mesh, exact_points(weight_exponent + 1, 0))
    s = np.sum(w * x ** weight_exponent, axis=1)
    local = np.einsum("n,in,jn->nij", s, dpsi[..., 0], dpsi[..., 0])
    return _gather(mesh, local)


def convection(mesh: Mesh) -> TriDiag:
    """Matrix of the form (w, v) -> int w_x v dx."""
    x, w, psi, dpsi = _element_data(mesh, 1)
    # local[n, test, trial]
    local = np.einsum("nq,inq,jn->nij", w, psi, dpsi[..., 0])
    return _gather(mesh, local)


def assemble_mass_sym(mesh: Mesh, N: int) -> TriDiag:
    _check_dim(N)
    return weighted_mass(mesh, N - 1)


def assemble_stiffness_sym(mesh: Mesh, N: int) -> TriDiag:
    _check_dim(N)
    return weighted_stiffness(mesh, N - 1)


def assemble_mass_nonsym(mesh: Mesh) -> TriDiag:
    return weighted_mass(mesh, 1)


def assemble_B(mesh: Mesh, N: int) -> TriDiag:
    _check_dim(N)
    K = weighted_stiffness(mesh, 1)
    if N == 2:
        return K
    return K + (2.0 - N) * convection(mesh)


def assemble_load(mesh: Mesh, weight_exponent: int, fspec: NonlinearitySpec,
                  u: NodalField, npts: int | None = None, rule: str = "quadrature") -> np.ndarray:
    """Vector of int x**weight_exponent f(u_h) phi_j dx over the free nodes.

    ``rule="quadrature"`` integrates f(u_h) phi_j with ``npts`` Gauss points per
    element. ``rule="interpolated"`` replaces f(u_h) by its P1 interpolant, so
    the vector is the weighted mass matrix applied to the nodal values f(u_j),
    including f(0) at the Dirichlet node.
    """
    if rule not in LOAD_RULES:
        raise ValueError(f"unknown load rule {rule!r}")
    if fspec.kind == "zero":
        return np.zeros(mesh.m)
    if rule == "interpolated":
        fvals = fspec.resolved(u.values)(u.full_values)
        M = weighted_mass(mesh, weight_exponent)
        out = tridiag_matvec(M, fvals[:-1])
        # coupling of the last free node to the boundary hat
        x, w, psi, _ = _element_data(mesh, exact_points(weight_exponent + 1))
        out[-1] += fvals[-1] * float(np.sum(w[-1] * x[-1] ** weight_exponent * psi[0, -1] * psi[1, -1]))
        return out
    if npts is None:
        npts = load_points_default()
    fspec = fspec.resolved(u.values)
    x, w, psi, _ = _element_data(mesh, npts)
    full = u.full_values
    uq = full[:-1, None] * psi[0] + full[1:, None] * psi[1]
    wf = w * x ** weight_exponent * fspec(uq)
    contrib = np.einsum("nq,inq->in", wf, psi)
    F = contrib[0].copy()
    F[1:] += contrib[1, :-1]
    return F


def integrate_field(u: NodalField, weight_exponent: int, g, npts: int) -> float:
    """int_I x**weight_exponent g(u_h(x)) dx by element-wise Gauss quadrature."""
    x, w, psi, _ = _element_data(u.mesh, npts)
    full = u.full_values
    uq = full[:-1, None] * psi[0] + full[1:, None] * psi[1]
    return float(np.sum(w * x ** weight_exponent * g(uq)))
