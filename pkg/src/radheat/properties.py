"""Randomized structural and qualitative checks, run by ``radheat props``.

Each check returns a :class:`CheckResult`; nothing here raises on failure.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import assembly
from .diagnostics import weighted_l2_norm
from .fields import NodalField
from .linalg import SingularSystemError
from .mesh import build_graded_mesh, build_uniform_mesh
from .nonlinearity import NonlinearitySpec
from .schemes import SchemeConfig, StepperState

SEED = 20240229


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _random_mesh(rng, m_max=64):
    m = int(rng.integers(2, m_max + 1))
    if rng.random() < 0.5:
        return build_uniform_mesh(m)
    return build_graded_mesh(m, float(rng.uniform(1.0, 2.5)))


def check_stiffness_structure(trials: int = 200, seed: int = SEED) -> CheckResult:
    """Zero interior row sums, negative off-diagonals and -mu/a <= h^2/4."""
    rng = np.random.default_rng(seed)
    worst_sum = 0.0
    worst_ratio = 0.0
    ok = True
    for _ in range(trials):
        mesh = _random_mesh(rng)
        N = int(rng.integers(2, 6))
        M = assembly.assemble_mass_sym(mesh, N)
        A = assembly.assemble_stiffness_sym(mesh, N)
        sums = A.row_sums()[:-1]
        worst_sum = max(worst_sum, float(np.max(np.abs(sums) / A.diag[:-1], initial=0.0)))
        off = A.upper[:-1]
        ok &= bool(np.all(off < 0))
        ratio = float(np.max(-M.upper[:-1] / off / mesh.h ** 2, initial=0.0))
        worst_ratio = max(worst_ratio, ratio)
    ok &= worst_sum <= 1e-12 and worst_ratio <= 0.25
    return CheckResult("stiffness structure", ok,
                       f"max |row sum|/diag={worst_sum:.2e}, max -mu/(a h^2)={worst_ratio:.4f} (<= 1/4)")


def check_coercivity(trials: int = 1000, seed: int = SEED) -> CheckResult:
    """w^T B w = w^T K_x w + (N-2)/2 w(0)^2 and Poincare w^T M' w <= w^T K_x w."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    poincare_ok = True
    for _ in range(trials):
        mesh = _random_mesh(rng)
        N = int(rng.integers(2, 6))
        w = rng.standard_normal(mesh.m)
        B = assembly.assemble_B(mesh, N)
        K = assembly.weighted_stiffness(mesh, 1)
        lhs = B.quadratic_form(w)
        rhs = K.quadratic_form(w) + 0.5 * (N - 2) * w[0] ** 2
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
        poincare_ok &= assembly.assemble_mass_nonsym(mesh).quadratic_form(w) <= K.quadratic_form(w)
    ok = worst <= 1e-12 and poincare_ok
    return CheckResult("B coercivity / Poincare", ok,
                       f"max rel. identity defect={worst:.2e}, Poincare {'holds' if poincare_ok else 'violated'}")


def _random_step_setup(rng, m_max=64):
    mesh = _random_mesh(rng, m_max)
    N = int(rng.integers(2, 6))
    alpha = float(rng.uniform(0.1, 4.0))
    cfg = SchemeConfig(N, "Sym", NonlinearitySpec.power(alpha), init_strategy="interpolate")
    return mesh, cfg


def check_positivity(trials: int = 1000, seed: int = SEED) -> CheckResult:
    """Sym step with tau = h^2/4 keeps nonnegative data nonnegative."""
    rng = np.random.default_rng(seed + 2)
    worst = np.inf
    for _ in range(trials):
        mesh, cfg = _random_step_setup(rng)
        # sparse spikes are the hardest case for C^{-1} >= 0
        v = rng.uniform(0.0, 1.0, mesh.m) * (rng.random(mesh.m) < rng.uniform(0.05, 1.0))
        u = NodalField(mesh, v * rng.choice([1.0, 5.0, 20.0]))
        state = StepperState(cfg, mesh, u)
        worst = min(worst, float(state.step(mesh.h ** 2 / 4).values.min()))
    return CheckResult("positivity (tau = h^2/4)", worst >= -1e-12, f"min component {worst:.3e}")


def check_comparison(trials: int = 1000, seed: int = SEED) -> CheckResult:
    """Ordered data stay ordered after one Sym step with tau = h^2/4."""
    rng = np.random.default_rng(seed + 3)
    worst = np.inf
    for _ in range(trials):
        mesh, cfg = _random_step_setup(rng)
        u = rng.uniform(0.0, 2.0, mesh.m)
        v = u + rng.uniform(0.0, 1.0, mesh.m) * (rng.random(mesh.m) < 0.7)
        tau = mesh.h ** 2 / 4
        a = StepperState(cfg, mesh, NodalField(mesh, u)).step(tau).values
        b = StepperState(cfg, mesh, NodalField(mesh, v)).step(tau).values
        worst = min(worst, float(np.min(b - a)))
    return CheckResult("comparison principle", worst >= -1e-12, f"min(u~ - u) after step {worst:.3e}")


def check_n2_equivalence(trials: int = 100, seed: int = SEED) -> CheckResult:
    rng = np.random.default_rng(seed + 4)
    worst = 0.0
    for _ in range(trials):
        mesh = _random_mesh(rng)
        fspec = NonlinearitySpec.power(float(rng.uniform(0.1, 3.0)))
        u = NodalField(mesh, rng.standard_normal(mesh.m))
        tau = float(10.0 ** rng.uniform(-6, 0))
        a = StepperState(SchemeConfig(2, "Sym", fspec), mesh, u).step(tau).values
        b = StepperState(SchemeConfig(2, "NonSym", fspec), mesh, u).step(tau).values
        worst = max(worst, float(np.max(np.abs(a - b))))
    return CheckResult("Sym == NonSym at N=2", worst <= 1e-11, f"max difference {worst:.2e}")


def check_solvability(seed: int = SEED) -> CheckResult:
    rng = np.random.default_rng(seed + 5)
    failures = 0
    count = 0
    for tau in np.logspace(-8, 0, 17):
        for variant in ("Sym", "NonSym"):
            for _ in range(10):
                mesh = _random_mesh(rng)
                N = int(rng.integers(2, 6))
                cfg = SchemeConfig(N, variant, NonlinearitySpec.power(1.0))
                u = NodalField(mesh, rng.standard_normal(mesh.m))
                count += 1
                try:
                    StepperState(cfg, mesh, u).step(float(tau))
                except SingularSystemError:
                    failures += 1
    return CheckResult("unconditional solvability", failures == 0, f"{failures} singular of {count} systems")


def inverse_inequality_ratios(N: int = 3, ms=(16, 32, 64, 128), samples: int = 200, seed: int = SEED):
    """max over random v_h of ||v_h||_inf / (h^{-N/2} ||v_h||), per mesh size."""
    rng = np.random.default_rng(seed + 6)
    out = []
    for m in ms:
        mesh = build_uniform_mesh(m)
        best = 0.0
        for _ in range(samples):
            v = rng.standard_normal(m)
            if rng.random() < 0.5:
                v = np.zeros(m)
                v[int(rng.integers(0, m))] = 1.0
            u = NodalField(mesh, v)
            ratio = np.max(np.abs(v)) / (mesh.h ** (-N / 2) * weighted_l2_norm(u, N))
            best = max(best, float(ratio))
        out.append(best)
    return out


def check_inverse_inequality() -> CheckResult:
    ok = True
    details = []
    for N in (2, 3, 4, 5):
        r = inverse_inequality_ratios(N)
        ok &= max(r) <= 1.5 * r[0]
        details.append(f"N={N}: " + "/".join(f"{v:.2f}" for v in r))
    return CheckResult("inverse inequality scaling", ok, "; ".join(details))


def check_energy_monotone() -> CheckResult:
    from .experiments import preset, run_experiment

    worst = -np.inf
    steps = 0
    for name in ("fig6a", "fig6b"):
        trace = run_experiment(preset(name)).trace
        e = trace.column("energy")
        worst = max(worst, float(np.max(np.diff(e))))
        steps += e.size - 1
    return CheckResult("energy non-increasing (fig6a/b)", worst <= 1e-12,
                       f"max J(n+1)-J(n) = {worst:.3e} over {steps} steps")


ALL_CHECKS = (check_stiffness_structure, check_coercivity, check_positivity, check_comparison,
              check_n2_equivalence, check_solvability, check_inverse_inequality, check_energy_monotone)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
