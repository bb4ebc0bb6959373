import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radheat.linalg import (SingularSystemError, ThomasFactorization, TriDiag, dense_solve, thomas_solve,
                            tridiag_matvec)


def tri(lower, diag, upper):
    return TriDiag(np.array([0.0] + list(lower)), np.array(diag, float), np.array(list(upper) + [0.0]))


def test_identity_solve():
    A = tri([0.0], [1.0, 1.0], [0.0])
    np.testing.assert_array_equal(thomas_solve(A, [3.0, -2.0]), [3.0, -2.0])


def test_two_by_two():
    A = tri([-1.0], [2.0, 2.0], [-1.0])
    np.testing.assert_allclose(thomas_solve(A, [1.0, 0.0]), [2 / 3, 1 / 3], atol=1e-15)


def test_matvec_examples():
    eye = tri([0.0], [1.0, 1.0], [0.0])
    np.testing.assert_array_equal(tridiag_matvec(eye, [4.0, 5.0]), [4.0, 5.0])
    A = tri([-1.0], [2.0, 2.0], [-1.0])
    np.testing.assert_array_equal(tridiag_matvec(A, [1.0, 1.0]), [1.0, 1.0])
    swap = tri([1.0], [0.0, 0.0], [1.0])
    np.testing.assert_array_equal(tridiag_matvec(swap, [2.0, 7.0]), [7.0, 2.0])


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        tridiag_matvec(tri([1.0], [1.0, 1.0], [1.0]), [1.0, 2.0, 3.0])


def test_singular_raises():
    with pytest.raises(SingularSystemError):
        thomas_solve(tri([1.0], [1.0, 1.0], [1.0]), [1.0, 1.0])
    with pytest.raises(SingularSystemError):
        thomas_solve(tri([1.0], [0.0, 1.0], [1.0]), [1.0, 1.0])


def test_one_by_one():
    np.testing.assert_allclose(thomas_solve(TriDiag([0.0], [4.0], [0.0]), [2.0]), [0.5])


def test_dense_round_trip_and_transpose():
    rng = np.random.default_rng(0)
    n = 7
    A = TriDiag(rng.standard_normal(n), 5 + rng.random(n), rng.standard_normal(n))
    D = A.to_dense()
    np.testing.assert_allclose(A.transpose().to_dense(), D.T)
    x = rng.standard_normal(n)
    np.testing.assert_allclose(tridiag_matvec(A, x), D @ x, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 1000), st.integers(0, 2 ** 32 - 1))
def test_round_trip_diagonally_dominant(n, seed):
    rng = np.random.default_rng(seed)
    lower, upper = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = (np.abs(lower) + np.abs(upper) + rng.uniform(0.1, 2.0, n)) * rng.choice([-1, 1], n)
    A = TriDiag(lower, diag, upper)
    x = rng.standard_normal(n)
    back = thomas_solve(A, tridiag_matvec(A, x))
    assert np.max(np.abs(back - x)) <= 1e-9 * np.max(np.abs(x))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2 ** 32 - 1))
def test_matches_dense_solver(n, seed):
    rng = np.random.default_rng(seed)
    A = TriDiag(rng.uniform(-1, 1, n), rng.uniform(3, 4, n), rng.uniform(-1, 1, n))
    b = rng.standard_normal(n)
    np.testing.assert_allclose(thomas_solve(A, b), dense_solve(A, b), atol=1e-12)


def test_factorization_reuse():
    A = tri([-1.0, -1.0], [2.0, 2.0, 2.0], [-1.0, -1.0])
    fac = ThomasFactorization(A)
    for b in np.eye(3):
        x = fac.solve(b)
        np.testing.assert_allclose(tridiag_matvec(A, x), b, atol=1e-14)
    assert np.all(fac.pivots > 0)
