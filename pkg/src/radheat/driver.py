"""Time loop: step a scheme until the final time or the blow-up threshold."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import assembly
from .diagnostics import (BLOWUP, REACHED_T, STEP_FAILURE, RunTrace, TraceRow,
                          blowup_monitor, energy_functional, linf_norm)
from .fields import NodalField
from .linalg import SingularSystemError
from .schemes import SchemeConfig, StepperState
from .time_control import TimeController, discrete_l2h_norm

log = logging.getLogger(__name__)

T_RTOL = 1e-6
MAX_STEPS = 10_000_000


@dataclass
class Snapshot:
    requested: float
    t: float
    u: NodalField


@dataclass
class SimulationResult:
    trace: RunTrace
    final: NodalField
    controller: TimeController
    snapshots: list[Snapshot] = field(default_factory=list)


def simulate(config: SchemeConfig, u0: NodalField, controller: TimeController, T: float,
             eps: float = 1e-8, snapshot_times: Sequence[float] = (),
             max_steps: int = MAX_STEPS) -> SimulationResult:
    """Run from ``u0`` at t = 0.

    A step is never taken past T: the run ends with ``reached_T`` at the last
    t_n with t_n + tau_n > T (to a relative slack of 1e-6 tau_n). A snapshot
    requested at time s holds the last state with t_n <= s.
    """
    mesh = u0.mesh
    state = StepperState(config, mesh, u0)
    stiffness = state.operator if config.variant == "Sym" else assembly.assemble_stiffness_sym(mesh, config.N)
    trace = RunTrace()
    pending = sorted(float(s) for s in snapshot_times)
    snapshots: list[Snapshot] = []
    n = 0

    def row_for(u: NodalField, t: float) -> TraceRow:
        l2h = discrete_l2h_norm(u, config.N, allow_nonuniform=controller.allow_nonuniform)
        with np.errstate(over="ignore", invalid="ignore"):
            energy = energy_functional(u, config.fspec, config.N, stiffness)
        return TraceRow(n, t, math.nan, l2h, linf_norm(u), energy, float(u.values.min()))

    def take_snapshots(upto: float, tol: float):
        while pending and pending[0] < upto - tol:
            snapshots.append(Snapshot(pending.pop(0), state.t, state.u))

    while True:
        row = row_for(state.u, state.t)
        trace.append(row)
        reason = blowup_monitor(trace, eps, T, t_tol=T_RTOL * controller.tau_base)
        if reason is None and not np.all(np.isfinite(state.u.values)):
            reason = BLOWUP
        if reason is None and n >= max_steps:
            reason = STEP_FAILURE
        tau = controller.propose(state.u, config.N) if reason is None else math.nan
        if reason is None and state.t + tau > T + T_RTOL * tau:
            reason = REACHED_T
        if reason is not None:
            trace.stop_reason = reason
            break
        take_snapshots(state.t + tau, T_RTOL * tau)
        controller.record(tau)
        row.tau_n = tau
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                state.step(tau)
        except SingularSystemError as exc:
            log.warning("step %d failed: %s", n, exc)
            trace.stop_reason = STEP_FAILURE
            break
        n += 1

    while pending:
        snapshots.append(Snapshot(pending.pop(0), state.t, state.u))
    return SimulationResult(trace, state.u, controller, snapshots)
