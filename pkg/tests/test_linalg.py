import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcs import ensembles as ens
from symcs import linalg as la
from symcs.errors import DimensionError, SingularMatrixError


def _random_symmetric(rng, dim):
    m = rng.normal(size=(dim, dim))
    return (m + m.T) / 2.0


def test_jacobi_two_by_two_exact():
    lo, hi = la.sym_eigen_extremes(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert lo == 0.5
    assert hi == 1.5


def test_jacobi_singleton_and_zero():
    assert la.sym_eigen_extremes(np.array([[3.5]])) == (3.5, 3.5)
    assert la.sym_eigen_extremes(np.zeros((3, 3))) == (0.0, 0.0)


def test_jacobi_diagonal_input():
    lo, hi = la.sym_eigen_extremes(np.diag([2.0, -1.0, 7.0]))
    assert (lo, hi) == (-1.0, 7.0)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(DimensionError):
        la.sym_eigen_extremes(np.array([[1.0, 2.0], [0.0, 1.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32))
def test_jacobi_matches_library_eigensolver(dim, seed):
    m = _random_symmetric(np.random.default_rng(seed), dim)
    lo, hi = la.sym_eigen_extremes(m)
    w = np.linalg.eigvalsh(m)
    scale = max(1.0, float(np.abs(w).max()))
    assert abs(lo - w[0]) <= 1e-10 * scale
    assert abs(hi - w[-1]) <= 1e-10 * scale


def test_gram_sign_path_has_exact_unit_diagonal():
    matrix = ens.gen_measurement("partial-symmetric-bernoulli", 100, 256, 1)
    g = la.gram_on_support(matrix, np.arange(8))
    assert np.all(np.diag(g) == 1.0)
    assert np.array_equal(g, g.T)
    # every entry is an integer dot over the row count
    dots = g * 100
    assert np.allclose(dots, np.rint(dots), atol=1e-9)


def test_gram_float_path_matches_sign_path():
    matrix = ens.gen_measurement("partial-symmetric-bernoulli", 50, 64, 3)
    support = np.array([0, 5, 9, 33])
    exact = la.gram_on_support(matrix, support)
    plain = la.gram_on_support(matrix.entries, support)
    assert np.allclose(exact, plain, atol=1e-12)
    assert np.array_equal(plain, plain.T)


def test_gram_rejects_repeated_support():
    matrix = ens.gen_measurement("gaussian", 4, 6, 0)
    with pytest.raises(DimensionError):
        la.gram_on_support(matrix, np.array([1, 1]))


def test_matvec_applies_measurement_matrix():
    matrix = ens.gen_measurement("gaussian", 3, 5, 2)
    x = np.arange(5.0)
    assert np.array_equal(la.matvec(matrix, x), matrix.entries @ x)
    with pytest.raises(DimensionError):
        la.matvec(matrix, np.ones(4))


def test_soft_threshold_known_values():
    out = la.soft_threshold(np.array([-2.0, -0.5, 0.0, 0.5, 2.0]), 1.0)
    assert np.array_equal(out, np.array([-1.0, -0.0, 0.0, 0.0, 1.0]))
    with pytest.raises(DimensionError):
        la.soft_threshold(np.ones(2), -0.1)


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20),
    st.floats(0.0, 1e6),
)
def test_soft_threshold_properties(values, threshold):
    v = np.array(values)
    out = la.soft_threshold(v, threshold)
    assert np.all(np.abs(out) == np.maximum(np.abs(v) - threshold, 0.0))
    assert np.all(out * v >= 0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32))
def test_solve_spd_matches_library_solver(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim))
    spd = a @ a.T + dim * np.eye(dim)
    b = rng.normal(size=dim)
    x = la.solve_spd(spd, b)
    assert np.allclose(x, np.linalg.solve(spd, b), atol=1e-9, rtol=1e-9)


def test_solve_spd_rejects_singular_and_indefinite():
    with pytest.raises(SingularMatrixError):
        la.solve_spd(np.zeros((2, 2)), np.ones(2))
    with pytest.raises(SingularMatrixError):
        la.solve_spd(np.array([[1.0, 0.0], [0.0, -1.0]]), np.ones(2))


def test_solve_spd_empty_system():
    assert la.solve_spd(np.zeros((0, 0)), np.zeros(0)).size == 0
