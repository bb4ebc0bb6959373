"""Experiment configuration, named presets, single runs and convergence studies."""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .diagnostics import (ErrorReport, RunTrace, error_vs_reference, fmt,
                          mesh_condition_holds, observed_orders)
from .driver import SimulationResult, Snapshot, simulate
from .fields import NodalField
from .mesh import build_uniform_mesh
from .nonlinearity import NonlinearitySpec
from .schemes import SchemeConfig, initialize
from .time_control import TimeController


class ConfigError(ValueError):
    pass


_SAFE_NAMES = {name: getattr(np, name) for name in
               ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh", "tanh", "pi")}


def initial_condition(ic: str) -> tuple[Callable, Optional[Callable]]:
    """(u0, du0) for an initial-condition id: ``cos``, ``<a>cos`` or an expression in x."""
    half_pi = 0.5 * math.pi
    if ic.endswith("cos"):
        prefix = ic[:-3]
        try:
            amp = float(prefix) if prefix else 1.0
        except ValueError:
            amp = None
        if amp is not None:
            return (lambda x: amp * np.cos(half_pi * np.asarray(x)),
                    lambda x: -amp * half_pi * np.sin(half_pi * np.asarray(x)))
    try:
        code = compile(ic, "<initial condition>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse initial condition {ic!r}") from exc
    for name in code.co_names:
        if name != "x" and name not in _SAFE_NAMES:
            raise ConfigError(f"name {name!r} not allowed in initial condition")

    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(eval(code, {"__builtins__": {}}, {**_SAFE_NAMES, "x": x}), x.shape)

    return u0, None


@dataclass
class ExperimentConfig:
    name: str = "custom"
    scheme: str = "Sym"
    N: int = 3
    alpha: float = 4.0 / 3.0
    nonlinearity: Optional[dict] = None  # full NonlinearitySpec; overrides alpha when set
    ic: str = "cos"
    m: int = 50
    m_list: list = field(default_factory=list)
    m_ref: int = 480
    lam: float = 0.5
    controller: str = "nakagawa"
    T: Union[float, list] = 0.2
    eps: float = 1e-8
    sigma: float = 0.1
    init_strategy: Optional[str] = None
    load_rule: str = "quadrature"
    load_quad_pts: Optional[int] = None
    snapshot_times: list = field(default_factory=list)
    out: Optional[str] = None

    @property
    def fspec(self) -> NonlinearitySpec:
        if self.nonlinearity:
            return NonlinearitySpec.from_dict(self.nonlinearity)
        return NonlinearitySpec.power(self.alpha)

    @property
    def times(self) -> list[float]:
        return [float(t) for t in self.T] if isinstance(self.T, (list, tuple)) else [float(self.T)]

    @property
    def nakagawa_alpha(self) -> float:
        fs = self.fspec
        return fs.alpha if fs.alpha > 0 else self.alpha

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.N, self.scheme, self.fspec, self.load_quad_pts,
                            self.init_strategy, self.load_rule)

    def controller_for(self, h: float) -> TimeController:
        tau = self.lam * h * h
        if self.controller == "uniform":
            return TimeController.uniform(tau)
        if self.controller == "nakagawa":
            return TimeController.nakagawa(tau, self.nakagawa_alpha)
        raise ConfigError(f"unknown controller {self.controller!r}")

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("out")
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


_RUN_TIMES = [0.0, 0.05, 0.1, 0.15, 0.2]

PRESETS: dict[str, ExperimentConfig] = {
    "fig1a": ExperimentConfig("fig1a", "Sym", 5, 4 / 3, ic="cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", load_rule="interpolated",
                              snapshot_times=_RUN_TIMES),
    "fig1b": ExperimentConfig("fig1b", "NonSym", 5, 4 / 3, ic="cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", load_rule="interpolated",
                              snapshot_times=_RUN_TIMES),
    "fig2a": ExperimentConfig("fig2a", "Sym", 5, 4 / 3, ic="13cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", load_rule="interpolated",
                              snapshot_times=[0.0, 0.02, 0.04, 0.06]),
    "fig2b": ExperimentConfig("fig2b", "NonSym", 5, 4 / 3, ic="13cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", load_rule="interpolated",
                              snapshot_times=[0.0, 0.02, 0.04, 0.06]),
    "fig3a": ExperimentConfig("fig3a", "Sym", 3, 4 / 3, ic="cos", m_list=[30, 60, 120, 240], m_ref=480,
                              lam=0.5, controller="uniform", T=0.005),
    "fig3b": ExperimentConfig("fig3b", "NonSym", 3, 4 / 3, ic="cos", m_list=[30, 60, 120, 240], m_ref=480,
                              lam=0.5, controller="uniform", T=0.005),
    "fig4": ExperimentConfig("fig4", "Sym", 4, 4.0, ic="3cos", m_list=[30, 60, 120, 240], m_ref=480,
                             lam=0.11, controller="uniform", T=[0.0011, 0.0022, 0.0033]),
    "fig6a": ExperimentConfig("fig6a", "Sym", 3, 4 / 3, ic="cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", snapshot_times=_RUN_TIMES),
    "fig6b": ExperimentConfig("fig6b", "Sym", 3, 4 / 3, ic="13cos", m=50, lam=0.5, T=0.2,
                              init_strategy="interpolate", snapshot_times=[0.0, 0.01, 0.02]),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


def _simulate_on(config: ExperimentConfig, m: int, snapshot_times) -> SimulationResult:
    mesh = build_uniform_mesh(m)
    scfg = config.scheme_config()
    u0, du0 = initial_condition(config.ic)
    uh0 = initialize(mesh, scfg, u0, du0)
    T = max(config.times)
    return simulate(scfg, uh0, config.controller_for(mesh.h), T, config.eps, snapshot_times)


def run_experiment(config: ExperimentConfig, out: Optional[Union[str, Path]] = None) -> SimulationResult:
    """Single simulation on a uniform mesh with ``config.m`` elements.

    When ``out`` (or ``config.out``) is set, writes config.json, trace.csv,
    mesh.txt and the plot-data files there.
    """
    result = _simulate_on(config, config.m, config.snapshot_times)
    out = out if out is not None else config.out
    if out is not None:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "config.json").write_text(config.to_json())
        (path / "trace.csv").write_text(result.trace.to_csv())
        (path / "mesh.txt").write_text(result.final.mesh.to_text())
        emit_plot_data(result, path)
    return result


@dataclass
class StudyRow:
    T: float
    m: int
    t_coarse: float
    t_ref: float
    report: ErrorReport
    mesh_condition: bool


@dataclass
class StudyResult:
    config: ExperimentConfig
    rows: list[StudyRow]

    def errors(self, T: float, norm: str) -> list[tuple[int, float]]:
        return [(r.m, getattr(r.report, norm)) for r in self.rows if r.T == T]

    def orders(self, T: float, norm: str) -> list[float]:
        return observed_orders(self.errors(T, norm))

    def to_csv(self) -> str:
        lines = ["T,m,h,t_coarse,t_ref,time_mismatch,L1err,L2err,LinfErr,LinfInteriorErr,mesh_condition"]
        for r in self.rows:
            rep = r.report
            lines.append(",".join([fmt(r.T), str(r.m), fmt(rep.h), fmt(r.t_coarse), fmt(r.t_ref),
                                   fmt(abs(r.t_ref - r.t_coarse)), fmt(rep.l1), fmt(rep.weightedL2),
                                   fmt(rep.linfFull), fmt(rep.linfInterior), str(int(r.mesh_condition))]))
        return "\n".join(lines) + "\n"

    def orders_csv(self) -> str:
        lines = ["T,m_from,m_to,L1order,L2order,LinfOrder,LinfInteriorOrder"]
        for T in self.config.times:
            ms = [m for m, _ in self.errors(T, "l1")]
            cols = [self.orders(T, n) for n in ("l1", "weightedL2", "linfFull", "linfInterior")]
            for k in range(len(ms) - 1):
                lines.append(",".join([fmt(T), str(ms[k]), str(ms[k + 1])] + [fmt(c[k]) for c in cols]))
        return "\n".join(lines) + "\n"


def _snapshot_by_time(snaps: list[Snapshot], T: float) -> Snapshot:
    return next(s for s in snaps if s.requested == T)


def convergence_study(config: ExperimentConfig, out: Optional[Union[str, Path]] = None,
                      jobs: int = 1) -> StudyResult:
    """Errors of each run in ``config.m_list`` against the ``m_ref`` run at every final time."""
    if config.controller != "uniform":
        raise ConfigError("convergence studies use the uniform controller")
    ms = sorted(int(m) for m in config.m_list)
    if not ms:
        raise ConfigError("convergence study needs a non-empty m_list")
    bad = [m for m in ms if config.m_ref % m]
    if bad:
        raise ConfigError(f"m values {bad} do not divide the reference m={config.m_ref}")
    times = config.times
    all_m = ms + [config.m_ref]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_simulate_on, [config] * len(all_m), all_m, [times] * len(all_m)))
    else:
        results = [_simulate_on(config, m, times) for m in all_m]
    ref = results[-1]
    rows = []
    for T in times:
        ref_snap = _snapshot_by_time(ref.snapshots, T)
        for m, res in zip(ms, results):
            snap = _snapshot_by_time(res.snapshots, T)
            rep = error_vs_reference(snap.u, ref_snap.u, config.N, config.sigma)
            h = snap.u.mesh.h
            rows.append(StudyRow(T, m, snap.t, ref_snap.t, rep,
                                 mesh_condition_holds(config.lam * h * h, h, config.N)))
    study = StudyResult(config, rows)
    out = out if out is not None else config.out
    if out is not None:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / "config.json").write_text(config.to_json())
        (path / "errors.csv").write_text(study.to_csv())
        (path / "orders.csv").write_text(study.orders_csv())
        emit_plot_data(study, path)
    return study


def _field_lines(u: NodalField) -> str:
    return "".join(f"{fmt(x)} {fmt(v)}\n" for x, v in zip(u.mesh.nodes, u.full_values))


def emit_plot_data(obj: Union[SimulationResult, StudyResult, RunTrace], out: Union[str, Path]) -> list[Path]:
    """Whitespace-delimited files for plotting: snapshots, energy series, error-vs-h."""
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    written = []
    if isinstance(obj, StudyResult):
        for k, T in enumerate(obj.config.times):
            p = path / f"orders_T{k}.dat"
            text = [f"# T={fmt(T)}\n# log_h log_L1err log_L2err log_LinfErr\n"]
            for r in obj.rows:
                if r.T == T:
                    rep = r.report
                    vals = [rep.h, rep.l1, rep.weightedL2, rep.linfFull]
                    text.append(" ".join(fmt(math.log(v)) if v > 0 else "nan" for v in vals) + "\n")
            p.write_text("".join(text))
            written.append(p)
        return written
    trace = obj if isinstance(obj, RunTrace) else obj.trace
    p = path / "energy.dat"
    p.write_text("# t_n J_h\n" + "".join(f"{fmt(r.t_n)} {fmt(r.energy)}\n" for r in trace.rows))
    written.append(p)
    if isinstance(obj, SimulationResult):
        for k, snap in enumerate(obj.snapshots):
            p = path / f"snapshot_{k}.dat"
            p.write_text(f"# requested_t={fmt(snap.requested)} t={fmt(snap.t)}\n# x u\n" + _field_lines(snap.u))
            written.append(p)
        p = path / "final.dat"
        p.write_text(f"# t={fmt(trace.final.t_n)}\n# x u\n" + _field_lines(obj.final))
        written.append(p)
    return written
