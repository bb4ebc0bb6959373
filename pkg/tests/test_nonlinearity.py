import numpy as np
import pytest
from hypothesis import given, strategies as st

from radheat.nonlinearity import NonlinearitySpec


def test_kinds():
    s = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    np.testing.assert_array_equal(NonlinearitySpec.zero()(s), 0.0)
    np.testing.assert_allclose(NonlinearitySpec.affine(2.0, 1.0)(s), 2 * s + 1)
    np.testing.assert_allclose(NonlinearitySpec.power(1.0)(s), s * np.abs(s))


@pytest.mark.parametrize("bad", [dict(kind="power", alpha=0.0), dict(kind="clipped-power", alpha=1.0, mu=-1.0),
                                 dict(kind="cubic")])
def test_invalid(bad):
    with pytest.raises(ValueError):
        NonlinearitySpec(**bad)


@given(st.floats(0.1, 4.0), st.floats(0.2, 5.0), st.floats(-20, 20))
def test_clipped_agrees_inside_and_is_odd(alpha, mu, s):
    clipped = NonlinearitySpec.clipped_power(alpha, mu)
    power = NonlinearitySpec.power(alpha)
    if abs(s) <= mu:
        assert clipped(s) == pytest.approx(power(s), rel=1e-12, abs=1e-300)
    assert clipped(-s) == pytest.approx(-clipped(s), rel=1e-12, abs=1e-12)


@given(st.floats(0.1, 4.0), st.floats(0.2, 3.0), st.floats(-10, 10), st.floats(-10, 10))
def test_clipped_lipschitz(alpha, mu, a, b):
    f = NonlinearitySpec.clipped_power(alpha, mu)
    assert abs(f(a) - f(b)) <= f.lipschitz * abs(a - b) * (1 + 1e-9) + 1e-12


def test_clipped_is_c1_at_mu():
    f = NonlinearitySpec.clipped_power(4 / 3, 2.0)
    eps = 1e-7
    for s0 in (2.0, -2.0):
        left = (f(s0) - f(s0 - eps)) / eps
        right = (f(s0 + eps) - f(s0)) / eps
        assert left == pytest.approx(right, rel=1e-5)


def test_default_mu_from_field():
    u = np.array([0.5, -3.0, 1.0])
    f = NonlinearitySpec.clipped_power(2.0).resolved(u)
    assert f.mu == 4.0
    np.testing.assert_allclose(f(u), NonlinearitySpec.power(2.0)(u))


@pytest.mark.parametrize("spec", [NonlinearitySpec.affine(1.5, -0.3), NonlinearitySpec.power(4 / 3),
                                  NonlinearitySpec.clipped_power(2.0, 1.5)])
def test_primitive_derivative(spec):
    s = np.linspace(-3, 3, 13)
    eps = 1e-6
    fd = (spec.primitive(s + eps) - spec.primitive(s - eps)) / (2 * eps)
    np.testing.assert_allclose(fd, spec(s), rtol=1e-6, atol=1e-6)
    assert spec.primitive(np.array(0.0)) == 0.0


def test_dict_round_trip():
    for spec in (NonlinearitySpec.zero(), NonlinearitySpec.affine(1.0, 2.0), NonlinearitySpec.power(4.0),
                 NonlinearitySpec.clipped_power(1.0, 3.0)):
        assert NonlinearitySpec.from_dict(spec.to_dict()) == spec
