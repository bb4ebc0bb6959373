"""Time-increment sequences: constant, or shrinking with the solution size."""
from __future__ import annotations

import math

import numpy as np

from .fields import NodalField


class UnsupportedMeshError(ValueError):
    pass


def discrete_l2h_norm(u: NodalField, N: int, allow_nonuniform: bool = False) -> float:
    """sqrt(sum_{j<m} h x_{j+1}^{N-1} u_j^2).

    The formula assumes a single mesh size. With ``allow_nonuniform=True`` the
    element width h_{j+1} replaces h (an extension, not the uniform formula).
    """
    mesh = u.mesh
    if mesh.is_uniform():
        h = np.full(mesh.m, 1.0 / mesh.m)
    elif allow_nonuniform:
        h = mesh.widths
    else:
        raise UnsupportedMeshError("discrete l2h norm is defined on uniform meshes only")
    scale = float(np.max(np.abs(u.values), initial=0.0))
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    # scaled to avoid underflow/overflow in the squares
    v = u.values / scale
    return scale * math.sqrt(float(np.sum(h * mesh.nodes[1:] ** (N - 1) * v * v)))


class TimeController:
    """Emits tau_n and keeps the history needed for gamma = tau_max/tau_min and
    delta = max |tau_k - tau_{k+1}|."""

    def __init__(self, kind: str, tau: float, alpha: float = 0.0, allow_nonuniform: bool = False):
        if kind not in ("uniform", "nakagawa"):
            raise ValueError(f"unknown controller kind {kind!r}")
        if not tau > 0:
            raise ValueError("base time increment must be positive")
        if kind == "nakagawa" and not alpha > 0:
            raise ValueError("nakagawa control needs alpha > 0")
        self.kind = kind
        self.tau_base = float(tau)
        self.alpha = float(alpha)
        self.allow_nonuniform = allow_nonuniform
        self.history: list[float] = []

    @classmethod
    def uniform(cls, tau: float) -> "TimeController":
        return cls("uniform", tau)

    @classmethod
    def nakagawa(cls, tau_base: float, alpha: float, **kw) -> "TimeController":
        return cls("nakagawa", tau_base, alpha, **kw)

    def propose(self, u: NodalField, N: int) -> float:
        """tau for the current state without recording it."""
        if self.kind == "uniform":
            return self.tau_base
        norm = discrete_l2h_norm(u, N, self.allow_nonuniform)
        if norm <= 1.0:
            return self.tau_base
        return self.tau_base * min(1.0, norm ** -self.alpha)

    def record(self, tau: float) -> None:
        self.history.append(float(tau))

    def next_tau(self, u: NodalField, N: int) -> float:
        tau = self.propose(u, N)
        self.record(tau)
        return tau

    @property
    def tau_min(self) -> float:
        return min(self.history) if self.history else self.tau_base

    @property
    def tau_max(self) -> float:
        return max(self.history) if self.history else self.tau_base

    @property
    def gamma(self) -> float:
        return self.tau_max / self.tau_min

    @property
    def delta(self) -> float:
        if len(self.history) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.history))))


def next_tau(controller: TimeController, u: NodalField, N: int) -> float:
    return controller.next_tau(u, N)
