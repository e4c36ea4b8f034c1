from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greenslab.core.discretization import discretize, make_problem
from greenslab.core.errors import DimensionError, NoConvergenceError, SingularMatrixError
from greenslab.core.grid import make_grid
from greenslab.core.linalg import factor_symmetric, invert, min_eigenvalue, solve
from greenslab.core.models import Family

MATRIX_DIMENSION = 5


def second_order_matrix(n: int) -> np.ndarray:
    return discretize(make_problem(Family.SECOND_ORDER_1D, make_grid(1, [0.0, 1.0], n))).matrix


def test_factor_identity():
    factorization = factor_symmetric(np.eye(4))
    assert factorization.kind == "cholesky"
    np.testing.assert_allclose(factorization.lower, np.eye(4))
    assert factorization.min_pivot == pytest.approx(1.0)


def test_factor_second_order_small():
    factorization = factor_symmetric(second_order_matrix(3))
    assert factorization.kind == "cholesky"
    assert factorization.min_pivot > 0
    np.testing.assert_allclose(factorization.reconstruct(), second_order_matrix(3))


def test_factor_indefinite_uses_ldl():
    matrix = np.array([[1.0, 2.0, 0.0], [2.0, 1.0, 0.5], [0.0, 0.5, -3.0]])
    factorization = factor_symmetric(matrix)
    assert factorization.kind == "ldl"
    np.testing.assert_allclose(factorization.reconstruct(), matrix, atol=1e-12)
    rhs = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(matrix @ solve(factorization, rhs), rhs, atol=1e-12)


def test_factor_singular():
    with pytest.raises(SingularMatrixError) as excinfo:
        factor_symmetric(np.diag([3.0, 7.0]) - 3.0 * np.eye(2))
    assert excinfo.value.min_pivot == pytest.approx(0.0, abs=1e-12)

    with pytest.raises(SingularMatrixError):
        factor_symmetric(np.zeros((3, 3)))


def test_factor_rejects_non_square():
    with pytest.raises(DimensionError):
        factor_symmetric(np.ones((2, 3)))


def test_solve_round_trip():
    matrix = second_order_matrix(3)
    x = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(solve(factor_symmetric(matrix), matrix @ x), x, rtol=1e-10)
    b = np.array([4.0, 5.0])
    np.testing.assert_allclose(solve(factor_symmetric(np.eye(2)), b), b)


def test_solve_unit_load_center():
    u = solve(factor_symmetric(second_order_matrix(199)), np.ones(199))
    assert u[99] == pytest.approx(0.125, abs=1e-4)


def test_solve_multiple_columns():
    matrix = second_order_matrix(9)
    rhs = np.random.default_rng(0).standard_normal((9, 4))
    np.testing.assert_allclose(matrix @ solve(factor_symmetric(matrix), rhs), rhs, atol=1e-10)


def test_solve_rejects_wrong_length():
    with pytest.raises(DimensionError):
        solve(factor_symmetric(np.eye(3)), np.ones(4))


def test_invert():
    np.testing.assert_allclose(invert(factor_symmetric(2.0 * np.eye(3))).matrix, 0.5 * np.eye(3))

    inverse = invert(factor_symmetric(second_order_matrix(3)))
    expected = np.array([[3, 2, 1], [2, 4, 2], [1, 2, 3]]) / 64.0
    np.testing.assert_allclose(inverse.matrix, expected, rtol=1e-12)
    np.testing.assert_array_equal(inverse.matrix, inverse.matrix.T)
    assert inverse.relative_defect <= 1e-9


def test_min_eigenvalue_diagonal():
    estimate = min_eigenvalue(np.diag([3.0, 7.0]))
    assert estimate.value == pytest.approx(3.0, rel=1e-10)
    assert estimate.iterations >= 1


def test_min_eigenvalue_second_order():
    n = 199
    h = 1.0 / (n + 1)
    estimate = min_eigenvalue(second_order_matrix(n))
    closed_form = 2.0 / h**2 * (1.0 - np.cos(np.pi * h))
    assert estimate.value == pytest.approx(closed_form, rel=1e-9)
    assert estimate.value == pytest.approx(np.pi**2, rel=1e-3)


def test_min_eigenvalue_clamped_beam():
    grid = make_grid(1, [0.0, 1.0], 199)
    matrix = discretize(make_problem(Family.FOURTH_ORDER_1D, grid)).matrix
    estimate = min_eigenvalue(matrix)
    assert estimate.value == pytest.approx(500.564, rel=1e-2)


@pytest.mark.parametrize(
    "family, n, rel",
    [
        (Family.FOURTH_ORDER_1D, 99, 1e-7),
        (Family.FOURTH_ORDER_1D, 399, 1e-5),
        (Family.SIXTH_ORDER_1D, 199, 1e-3),
    ],
)
def test_min_eigenvalue_converges_on_stiff_stencils(family, n, rel):
    matrix = discretize(make_problem(family, make_grid(1, [0.0, 1.0], n))).matrix
    estimate = min_eigenvalue(matrix)
    assert estimate.value == pytest.approx(scipy.linalg.eigvalsh(matrix)[0], rel=rel)
    assert estimate.value > 0.0


def test_min_eigenvalue_with_certified_shift():
    matrix = second_order_matrix(49) + 100.0 * np.eye(49)
    plain = min_eigenvalue(matrix)
    shifted = min_eigenvalue(matrix, shift=100.0)
    assert shifted.value == pytest.approx(plain.value, rel=1e-10)
    assert shifted.shift == 100.0


def test_min_eigenvalue_moves_a_bad_shift(caplog):
    with caplog.at_level("WARNING"):
        estimate = min_eigenvalue(np.diag([3.0, 7.0]), shift=5.0)
    assert estimate.value == pytest.approx(3.0, rel=1e-10)
    assert estimate.shift < 3.0
    assert "Gershgorin" in caplog.text


def test_min_eigenvalue_indefinite():
    estimate = min_eigenvalue(np.diag([-2.0, 1.0, 4.0]))
    assert estimate.value == pytest.approx(-2.0, rel=1e-10)


def test_min_eigenvalue_iteration_cap():
    matrix = np.diag([1.0, 1.0 + 1e-9, 5.0])
    with pytest.raises(NoConvergenceError) as excinfo:
        min_eigenvalue(matrix, tol=1e-15, max_iter=3)
    assert excinfo.value.iterations == 3


def test_positive_definite_iff_cholesky():
    for family in Family:
        dimension = family.dimension
        grid = make_grid(dimension, [0.0, 1.0] * dimension, 7)
        matrix = discretize(make_problem(family, grid)).matrix
        assert (min_eigenvalue(matrix).value > 0) == (factor_symmetric(matrix).kind == "cholesky")


@settings(max_examples=50, deadline=None)
@given(
    eigenvalues=arrays(
        np.float64,
        (MATRIX_DIMENSION,),
        elements=st.floats(min_value=0.5, max_value=50.0),
    ),
    angles=arrays(
        np.float64,
        (MATRIX_DIMENSION, MATRIX_DIMENSION),
        elements=st.floats(min_value=-1.0, max_value=1.0),
    ),
)
def test_inverse_of_random_spd_hypothesis(eigenvalues, angles):
    q, _ = np.linalg.qr(angles + 3.0 * np.eye(MATRIX_DIMENSION))
    matrix = (q * eigenvalues) @ q.T
    matrix = 0.5 * (matrix + matrix.T)
    inverse = invert(factor_symmetric(matrix)).matrix

    assert np.allclose(matrix @ inverse, np.eye(MATRIX_DIMENSION), atol=1e-9)
    np.testing.assert_array_equal(inverse, inverse.T)
