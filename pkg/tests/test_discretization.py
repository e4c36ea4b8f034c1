from __future__ import annotations

import numpy as np
import pytest

from greenslab.core.discretization import (
    admissibility_check,
    apply_operator,
    checked_factorization,
    constant_potential,
    discretize,
    gaussian_bump_potential,
    make_problem,
    stencil_matrix,
)
from greenslab.core.errors import NonFiniteValueError, StencilError
from greenslab.core.grid import field_from_values, make_grid, sample_field
from greenslab.core.linalg import factor_symmetric, min_eigenvalue, solve
from greenslab.core.models import Family


def make_operator(family: Family, n: int = 9, c: float = 0.0):
    dimension = family.dimension
    grid = make_grid(dimension, [0.0, 1.0] * dimension, n)
    potential = constant_potential(c) if c else None
    return discretize(make_problem(family, grid, potential))


def test_second_order_matrix():
    op = make_operator(Family.SECOND_ORDER_1D, n=3)
    expected = 16.0 * np.array([[2, -1, 0], [-1, 2, -1], [0, -1, 2]], dtype=float)
    np.testing.assert_allclose(op.matrix, expected)


def test_fourth_order_ghost_reflection():
    op = make_operator(Family.FOURTH_ORDER_1D, n=5)
    h4 = (1.0 / 6.0) ** 4
    assert op.matrix[0, 0] == pytest.approx(7.0 / h4)
    assert op.matrix[-1, -1] == pytest.approx(7.0 / h4)
    assert op.matrix[2, 2] == pytest.approx(6.0 / h4)
    np.testing.assert_allclose(op.matrix[2], np.array([1, -4, 6, -4, 1]) / h4)


def test_sixth_order_stencil_is_positive_and_symmetric():
    matrix = stencil_matrix(6, 9)
    np.testing.assert_array_equal(matrix[4, 1:8], [-1, 6, -15, 20, -15, 6, -1])
    np.testing.assert_array_equal(matrix, matrix.T)
    assert np.all(np.linalg.eigvalsh(matrix) > 0)


def test_laplace_2d_stencil():
    op = make_operator(Family.LAPLACE_2D, n=3)
    np.testing.assert_allclose(np.diag(op.matrix), np.full(9, 64.0))
    center = op.matrix[4]
    assert sorted(center[center < 0]) == [-16.0] * 4


def test_biharmonic_2d_is_symmetric_positive_definite():
    op = make_operator(Family.BIHARMONIC_2D, n=7)
    np.testing.assert_array_equal(op.matrix, op.matrix.T)
    assert factor_symmetric(op.matrix).kind == "cholesky"


def test_potential_adds_diagonal():
    base = make_operator(Family.FOURTH_ORDER_1D, n=9)
    shifted = make_operator(Family.FOURTH_ORDER_1D, n=9, c=250.0)
    np.testing.assert_allclose(shifted.matrix - base.matrix, 250.0 * np.eye(9))


def test_gaussian_bump_potential():
    grid = make_grid(1, [0.0, 1.0], 9)
    op = discretize(make_problem(Family.SECOND_ORDER_1D, grid, gaussian_bump_potential(10.0, [0.5], 0.1), "bump"))
    assert op.potential_values[4] == pytest.approx(10.0)
    assert op.potential_values[0] < op.potential_values[4]
    assert op.spec.potential_label == "bump"


def test_make_problem_checks_dimension():
    with pytest.raises(StencilError):
        make_problem(Family.LAPLACE_2D, make_grid(1, [0.0, 1.0], 5))


def test_discretize_needs_enough_nodes():
    grid = make_grid(1, [0.0, 1.0], 5)
    with pytest.raises(StencilError):
        discretize(make_problem(Family.SIXTH_ORDER_1D, grid))


def test_discretize_rejects_non_finite_potential():
    grid = make_grid(1, [0.0, 1.0], 5)
    problem = make_problem(Family.SECOND_ORDER_1D, grid, lambda x: np.log(x - 0.5))
    with pytest.raises(NonFiniteValueError):
        discretize(problem)


def test_apply_operator_on_eigenfunction():
    op = make_operator(Family.SECOND_ORDER_1D, n=199)
    grid = op.grid
    sine = sample_field(grid, lambda x: np.sin(np.pi * x))
    result = apply_operator(op, sine)
    h = grid.spacing[0]
    assert np.max(np.abs(result.values - np.pi**2 * sine.values)) <= np.pi**4 * h**2 / 12 * np.pi**2

    zero = apply_operator(op, field_from_values(grid, np.zeros(grid.size)))
    assert not zero.values.any()


def test_apply_operator_inverts_solve():
    op = make_operator(Family.FOURTH_ORDER_1D, n=49)
    rhs = np.random.default_rng(3).standard_normal(49)
    u = solve(factor_symmetric(op.matrix), rhs)
    back = apply_operator(op, field_from_values(op.grid, u)).values
    assert np.max(np.abs(back - rhs)) <= 1e-10 * np.max(np.abs(rhs)) * 10


def test_second_order_solution_converges():
    errors = []
    for n in (49, 99, 199):
        op = make_operator(Family.SECOND_ORDER_1D, n=n)
        f = sample_field(op.grid, lambda x: np.pi**2 * np.sin(np.pi * x))
        u = solve(factor_symmetric(op.matrix), f.values)
        errors.append(np.max(np.abs(u - np.sin(np.pi * op.grid.nodes[:, 0]))))
    assert errors[0] / errors[1] == pytest.approx(4.0, abs=0.5)
    assert errors[1] / errors[2] == pytest.approx(4.0, abs=0.5)


def test_admissibility_of_menu():
    for family in Family:
        report = admissibility_check(make_operator(family, n=7))
        assert report.admissible, family
        assert report.symmetry_defect == 0.0
        assert report.factorization == "cholesky"


def test_shift_by_smallest_eigenvalue_is_inadmissible():
    grid = make_grid(1, [0.0, 1.0], 8)
    base = discretize(make_problem(Family.FOURTH_ORDER_1D, grid))
    lam = min_eigenvalue(base.matrix).value
    shifted = discretize(make_problem(Family.FOURTH_ORDER_1D, grid, constant_potential(-lam)))
    report = admissibility_check(shifted)
    assert not report.admissible
    assert not report.invertible
    assert report.factorization is None
    assert "pivot" in report.message


def test_checked_factorization_returns_the_factors():
    op = make_operator(Family.FOURTH_ORDER_1D, n=9)
    report, factorization = checked_factorization(op)
    assert report == admissibility_check(op)
    assert factorization is not None
    assert factorization.kind == report.factorization
    np.testing.assert_allclose(factorization.reconstruct(), op.matrix, atol=1e-9 * op.scale)

    singular = discretize(make_problem(Family.SECOND_ORDER_1D, make_grid(1, [0.0, 1.0], 9)))
    report, factorization = checked_factorization(singular, tol_sing=0.9)
    assert not report.admissible
    assert factorization is None
