import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import composite_gauss, exact_matrix
from radheat.assembly import assemble_load
from radheat.diagnostics import discrete_energy, observed_orders
from radheat.fields import NodalField
from radheat.linalg import SingularSystemError
from radheat.mesh import build_graded_mesh, build_uniform_mesh
from radheat.nonlinearity import NonlinearitySpec
from radheat.schemes import (IncompatibleBoundaryError, SchemeConfig, StepperState, initialize, ritz_projection,
                             ritz_residual, step)

COS = lambda x: np.cos(np.pi * np.asarray(x) / 2)
DCOS = lambda x: -np.pi / 2 * np.sin(np.pi * np.asarray(x) / 2)
W = lambda x: 1 - np.asarray(x) ** 2
DW = lambda x: -2 * np.asarray(x)


@pytest.mark.parametrize("variant", ["Sym", "NonSym"])
@pytest.mark.parametrize("fspec", [NonlinearitySpec.zero(), NonlinearitySpec.power(1.5)])
def test_zero_is_fixed_point(variant, fspec):
    mesh = build_uniform_mesh(10)
    state = StepperState(SchemeConfig(3, variant, fspec), mesh, NodalField.zeros(mesh))
    np.testing.assert_array_equal(step(state, 0.01).values, 0.0)


@pytest.mark.parametrize("variant", ["Sym", "NonSym"])
def test_step_matches_dense_solve(variant):
    N, m = 3, 16
    mesh = build_uniform_mesh(m)
    fspec = NonlinearitySpec.power(4 / 3)
    u = NodalField.interpolate(mesh, COS)
    tau = mesh.h ** 2 / 2
    if variant == "Sym":
        M, K, k = exact_matrix(mesh.nodes, N - 1, "mass"), exact_matrix(mesh.nodes, N - 1, "stiff"), N - 1
    else:
        M = exact_matrix(mesh.nodes, 1, "mass")
        K = exact_matrix(mesh.nodes, 1, "stiff") + (2 - N) * exact_matrix(mesh.nodes, 0, "conv")
        k = 1
    F = assemble_load(mesh, k, fspec, u)
    expected = np.linalg.solve(M + tau * K, M @ u.values + tau * F)
    state = StepperState(SchemeConfig(N, variant, fspec), mesh, u)
    np.testing.assert_allclose(state.step(tau).values, expected, atol=1e-10)
    assert state.t == tau


def test_factorization_cached_by_tau():
    mesh = build_uniform_mesh(8)
    state = StepperState(SchemeConfig(3, "Sym", NonlinearitySpec.power(1.0)), mesh, NodalField.interpolate(mesh, COS))
    f1 = state.factorization(0.01)
    assert state.factorization(0.01) is f1
    assert state.factorization(0.02) is not f1
    expected = state.mass.to_dense() + 0.02 * state.operator.to_dense()
    np.testing.assert_allclose(state.system.to_dense(), expected, atol=1e-15)


def test_nonpositive_tau_rejected():
    mesh = build_uniform_mesh(4)
    state = StepperState(SchemeConfig(2), mesh, NodalField.zeros(mesh))
    with pytest.raises(ValueError):
        state.step(0.0)


def test_config_defaults():
    assert SchemeConfig(3, "Sym").init_strategy == "ritzA"
    assert SchemeConfig(3, "NonSym").init_strategy == "ritzB"
    assert SchemeConfig(4, "Sym").weight_exponent == 3
    assert SchemeConfig(4, "NonSym").weight_exponent == 1
    with pytest.raises(ValueError):
        SchemeConfig(3, "Other")
    with pytest.raises(ValueError):
        SchemeConfig(1)


def test_quad_points_env_override(monkeypatch):
    monkeypatch.setenv("RADHEAT_QUAD_PTS", "7")
    assert SchemeConfig(3).quad_pts == 7
    assert SchemeConfig(3, load_quad_pts=3).quad_pts == 3


def test_interpolate_initial_value():
    mesh = build_uniform_mesh(2)
    u = initialize(mesh, SchemeConfig(3, init_strategy="interpolate"), COS)
    np.testing.assert_allclose(u.values, [1.0, math.sqrt(2) / 2], atol=1e-15)
    u13 = initialize(mesh, SchemeConfig(3, init_strategy="interpolate"), lambda x: 13 * COS(x))
    np.testing.assert_allclose(u13.values, 13 * u.values, atol=1e-14)


def test_incompatible_boundary():
    with pytest.raises(IncompatibleBoundaryError):
        initialize(build_uniform_mesh(4), SchemeConfig(3), lambda x: np.ones_like(x))


@pytest.mark.parametrize("strategy,variant", [("ritzA", "A"), ("ritzB", "B")])
def test_ritz_initial_value_is_orthogonal(strategy, variant):
    mesh = build_graded_mesh(12, 1.5)
    p = initialize(mesh, SchemeConfig(3, init_strategy=strategy), W, DW)
    assert np.max(np.abs(ritz_residual(p, 3, variant, W, DW))) <= 1e-9
    # the finite-difference derivative path is accurate enough too
    q = initialize(mesh, SchemeConfig(3, init_strategy=strategy), W)
    assert np.max(np.abs(ritz_residual(q, 3, variant, W, DW))) <= 1e-9


def test_weighted_l2_initial_value_is_projection():
    N = 4
    mesh = build_uniform_mesh(10)
    p = initialize(mesh, SchemeConfig(N, init_strategy="weightedL2"), COS)
    # (p - u0, phi_j) = 0 for every free hat
    for j in range(mesh.m):
        phi = lambda x, j=j: np.interp(x, mesh.nodes, np.eye(mesh.m + 1)[j])
        g = lambda x: x ** (N - 1) * (p(x) - COS(x)) * phi(x)
        assert abs(composite_gauss(g, 0.0, 1.0, pieces=mesh.m * 4)) <= 1e-12


@pytest.mark.parametrize("variant", ["A", "B"])
@pytest.mark.parametrize("N", [2, 3, 5])
def test_ritz_is_identity_on_sh(variant, N):
    mesh = build_graded_mesh(9, 1.4)
    vals = np.random.default_rng(1).standard_normal(mesh.m)
    full = np.append(vals, 0.0)
    w = lambda x: np.interp(x, mesh.nodes, full)
    slopes = np.diff(full) / mesh.widths
    dw = lambda x: slopes[np.clip(np.searchsorted(mesh.nodes, x) - 1, 0, mesh.m - 1)]
    p = ritz_projection(mesh, N, variant, w, dw)
    np.testing.assert_allclose(p.values, vals, atol=1e-12)


def _weighted_l2_error(p, w, N):
    g = lambda x: x ** (N - 1) * (p(x) - w(x)) ** 2
    return math.sqrt(sum(composite_gauss(g, a, b, pieces=4, npts=10) for a, b in zip(p.mesh.nodes[:-1], p.mesh.nodes[1:])))


def _linf_error(p, w):
    x = np.linspace(0, 1, 20001)
    return float(np.max(np.abs(p(x) - w(x))))


def test_ritz_convergence_orders():
    ms = [8, 16, 32, 64]
    ea, eb = [], []
    for m in ms:
        mesh = build_uniform_mesh(m)
        ea.append((m, _weighted_l2_error(ritz_projection(mesh, 3, "A", W, DW), W, 3)))
        eb.append((m, _linf_error(ritz_projection(mesh, 3, "B", W, DW), W)))
    assert min(observed_orders(ea)) >= 1.9
    assert min(observed_orders(eb)) >= 1.9


def _setup(data):
    m = data.draw(st.integers(2, 64))
    mesh = build_uniform_mesh(m) if data.draw(st.booleans()) else build_graded_mesh(m, data.draw(st.floats(1.0, 2.5)))
    N = data.draw(st.integers(2, 5))
    alpha = data.draw(st.floats(0.1, 4.0))
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
    return mesh, SchemeConfig(N, "Sym", NonlinearitySpec.power(alpha)), rng


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_positivity_property(data):
    mesh, cfg, rng = _setup(data)
    u = rng.uniform(0, 5, mesh.m) * (rng.random(mesh.m) < 0.4)
    tau = mesh.h ** 2 / 4 * data.draw(st.floats(1.0, 100.0))
    new = StepperState(cfg, mesh, NodalField(mesh, u)).step(tau)
    assert new.values.min() >= -1e-12


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_comparison_property(data):
    mesh, cfg, rng = _setup(data)
    u = rng.uniform(0, 2, mesh.m)
    v = u + rng.uniform(0, 1, mesh.m) * (rng.random(mesh.m) < 0.5)
    tau = mesh.h ** 2 / 4
    a = StepperState(cfg, mesh, NodalField(mesh, u)).step(tau).values
    b = StepperState(cfg, mesh, NodalField(mesh, v)).step(tau).values
    assert np.all(a <= b + 1e-12)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_sym_nonsym_agree_at_n2(data):
    mesh, cfg, rng = _setup(data)
    u = NodalField(mesh, rng.standard_normal(mesh.m))
    tau = 10 ** data.draw(st.floats(-6, 0))
    fspec = cfg.fspec
    a = StepperState(SchemeConfig(2, "Sym", fspec), mesh, u).step(tau).values
    b = StepperState(SchemeConfig(2, "NonSym", fspec), mesh, u).step(tau).values
    np.testing.assert_allclose(a, b, atol=1e-11)


@pytest.mark.parametrize("tau", [1e-8, 1e-5, 1e-2, 1.0])
@pytest.mark.parametrize("variant", ["Sym", "NonSym"])
def test_unconditional_solvability(tau, variant):
    for N in (2, 3, 4, 5):
        for mesh in (build_uniform_mesh(64), build_graded_mesh(40, 2.5)):
            u = NodalField(mesh, np.random.default_rng(N).standard_normal(mesh.m))
            try:
                StepperState(SchemeConfig(N, variant, NonlinearitySpec.power(2.0)), mesh, u).step(tau)
            except SingularSystemError:  # pragma: no cover
                pytest.fail(f"singular system at tau={tau}, N={N}")


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_energy_decreases_for_any_tau(data):
    m = data.draw(st.integers(4, 40))
    mesh = build_uniform_mesh(m)
    N = data.draw(st.integers(2, 5))
    alpha = data.draw(st.floats(0.2, 3.0))
    amp = data.draw(st.floats(0.1, 3.0))
    cfg = SchemeConfig(N, "Sym", NonlinearitySpec.power(alpha), init_strategy="interpolate")
    u = initialize(mesh, cfg, lambda x: amp * COS(x))
    state = StepperState(cfg, mesh, u)
    tau = 10 ** data.draw(st.floats(-6, 0))
    before = discrete_energy(state.u, alpha, N)
    after = discrete_energy(state.step(tau), alpha, N)
    assert after <= before + 1e-12
