"""Norms, discrete energy, reference-solution errors and run bookkeeping."""
from __future__ import annotations

import io
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import assembly
from .fields import NodalField, NotNestedError, nodes_nested

ENERGY_POINTS = 8
DEFAULT_SIGMA = 0.1
TRACE_COLUMNS = ("n", "t_n", "tau_n", "l2h_norm", "linf_norm", "energy", "min_nodal")

REACHED_T = "reached_T"
BLOWUP = "blowup_threshold"
STEP_FAILURE = "step_failure"


def fmt(x: float) -> str:
    return f"{x:.17g}"


def weighted_l2_norm(u: NodalField, N: int) -> float:
    M = assembly.assemble_mass_sym(u.mesh, N)
    return math.sqrt(max(M.quadratic_form(u.values), 0.0))


def linf_norm(u: NodalField, sigma: float = 0.0) -> float:
    if not sigma < 1.0:
        raise ValueError("sigma must be < 1")
    nodes = u.mesh.nodes
    vals = np.abs(u.full_values[nodes >= sigma])
    at_sigma = abs(float(u(max(sigma, 0.0))))
    return float(max(vals.max(initial=0.0), at_sigma))


def l1_norm(u: NodalField) -> float:
    """Exact integral of |u_h|; elements with a sign change are split at the root."""
    v = u.full_values
    a, b = v[:-1], v[1:]
    h = u.mesh.widths
    same = a * b >= 0
    s = np.abs(a) + np.abs(b)
    with np.errstate(invalid="ignore", divide="ignore"):
        split = np.where(s > 0, (a * a + b * b) / np.where(s > 0, s, 1.0), 0.0)
    return float(np.sum(np.where(same, 0.5 * h * s, 0.5 * h * split)))


def discrete_energy(u: NodalField, alpha: float, N: int, stiffness=None) -> float:
    """1/2 A(u,u) - 1/(alpha+2) int x^{N-1} |u|^{alpha+2} dx."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    A = stiffness if stiffness is not None else assembly.assemble_stiffness_sym(u.mesh, N)
    grad = 0.5 * A.quadratic_form(u.values)
    pot = assembly.integrate_field(u, N - 1, lambda s: np.abs(s) ** (alpha + 2.0), ENERGY_POINTS)
    return grad - pot / (alpha + 2.0)


def energy_functional(u: NodalField, fspec, N: int, stiffness=None) -> float:
    """1/2 A(u,u) - int x^{N-1} F(u) dx, F the primitive of f; equals
    :func:`discrete_energy` for the power nonlinearity."""
    A = stiffness if stiffness is not None else assembly.assemble_stiffness_sym(u.mesh, N)
    fspec = fspec.resolved(u.values)
    pot = assembly.integrate_field(u, N - 1, fspec.primitive, ENERGY_POINTS)
    return 0.5 * A.quadratic_form(u.values) - pot


@dataclass
class ErrorReport:
    l1: float
    weightedL2: float
    linfFull: float
    linfInterior: float
    h: float
    h_ref: float
    sigma: float = DEFAULT_SIGMA


def error_vs_reference(coarse: NodalField, fine: NodalField, N: int,
                       sigma: float = DEFAULT_SIGMA) -> ErrorReport:
    """Errors of ``coarse`` against ``fine`` after exact prolongation onto the fine mesh."""
    if not nodes_nested(coarse.mesh, fine.mesh):
        raise NotNestedError("coarse mesh nodes are not a subset of the reference mesh nodes")
    diff = fine - coarse.prolongate(fine.mesh)
    return ErrorReport(
        l1=l1_norm(diff),
        weightedL2=weighted_l2_norm(diff, N),
        linfFull=linf_norm(diff, 0.0),
        linfInterior=linf_norm(diff, sigma),
        h=coarse.mesh.h,
        h_ref=fine.mesh.h,
        sigma=sigma,
    )


class UndefinedOrderError(ValueError):
    pass


def observed_orders(errors: Sequence[tuple[int, float]]) -> list[float]:
    """log2 of successive error ratios for meshes doubling in m."""
    for m, e in errors:
        if not e > 0:
            raise UndefinedOrderError(f"error at m={m} is {e}; order undefined")
    out = []
    for (m0, e0), (m1, e1) in zip(errors, errors[1:]):
        if not m1 > m0:
            raise ValueError("m values must increase")
        out.append(math.log(e0 / e1) / math.log(m1 / m0))
    return out


def mesh_condition_holds(tau: float, h: float, N: int, exponent: float = 0.1) -> bool:
    """Whether tau h^{-N/2} <= h^exponent (unit constant)."""
    return tau * h ** (-N / 2) <= h ** exponent


@dataclass
class TraceRow:
    n: int
    t_n: float
    tau_n: float
    l2h_norm: float
    linf_norm: float
    energy: float
    min_nodal: float

    def values(self):
        return tuple(getattr(self, c) for c in TRACE_COLUMNS)


@dataclass
class RunTrace:
    """Per-step history. Row n describes u^n at t_n; tau_n is the increment
    used to leave it (NaN on the final row)."""

    rows: list[TraceRow] = field(default_factory=list)
    stop_reason: Optional[str] = None

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def final(self) -> Optional[TraceRow]:
        return self.rows[-1] if self.rows else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(TRACE_COLUMNS) + "\n")
        for r in self.rows:
            buf.write(str(r.n) + "," + ",".join(fmt(v) for v in r.values()[1:]) + "\n")
        buf.write(f"# stop_reason={self.stop_reason}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunTrace":
        trace = cls()
        for line in text.splitlines()[1:]:
            if line.startswith("#"):
                if "stop_reason=" in line:
                    reason = line.split("stop_reason=", 1)[1].strip()
                    trace.stop_reason = None if reason == "None" else reason
                continue
            parts = line.split(",")
            trace.append(TraceRow(int(parts[0]), *(float(p) for p in parts[1:])))
        return trace


def blowup_monitor(trace: RunTrace, eps: float, T: float, t_tol: float = 0.0) -> Optional[str]:
    """Stop reason for the last trace row, or None to continue."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    last = trace.final
    if last is None:
        return None
    norm = last.l2h_norm
    if not math.isfinite(norm) or (norm > 0 and 1.0 / norm < eps):
        return BLOWUP
    if last.t_n >= T - t_tol:
        return REACHED_T
    return None


def report_dict(rep: ErrorReport) -> dict:
    return asdict(rep)
