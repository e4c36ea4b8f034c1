from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import quad

from greenslab.core.errors import OracleDomainError
from greenslab.core.grid import make_grid
from greenslab.core.models import Family
from greenslab.oracles.exact import (
    exact_greens_beam,
    exact_greens_second_order,
    exact_kernel,
    exact_kernel_matrix,
    exact_unit_load,
)


def test_second_order_values():
    assert exact_greens_second_order(0.5, 0.5) == 0.25
    assert exact_greens_second_order(0.25, 0.75) == 0.0625
    assert exact_greens_second_order(0.0, 0.3) == 0.0
    for x, xi in [(0.1, 0.7), (0.4, 0.45), (0.9, 0.2)]:
        assert exact_greens_second_order(x, xi) == exact_greens_second_order(xi, x)


def test_beam_values():
    assert exact_greens_beam(0.5, 0.5) == pytest.approx(1.0 / 192.0, rel=1e-12)
    assert exact_greens_beam(0.0, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert exact_greens_beam(1.0, 0.3) == pytest.approx(0.0, abs=1e-15)
    for x, xi in [(0.1, 0.7), (0.4, 0.45), (0.9, 0.2)]:
        assert exact_greens_beam(x, xi) == pytest.approx(exact_greens_beam(xi, x), rel=1e-10)


def test_beam_integrates_to_unit_load():
    value, _ = quad(lambda xi: exact_greens_beam(0.5, xi), 0.0, 1.0, points=[0.5])
    assert value == pytest.approx(1.0 / 384.0, rel=1e-10)
    assert exact_unit_load(Family.FOURTH_ORDER_1D, 0.5) == pytest.approx(1.0 / 384.0)
    assert exact_unit_load(Family.SECOND_ORDER_1D, 0.5) == 0.125


def test_beam_is_nonnegative():
    xs = np.linspace(0.0, 1.0, 41)
    values = np.array([[exact_greens_beam(x, xi) for xi in xs] for x in xs])
    assert values.min() >= -1e-15


def test_residual_vanishes_away_from_source():
    for family in (Family.SECOND_ORDER_1D, Family.FOURTH_ORDER_1D):
        kernel = exact_kernel(family)
        assert kernel.residual(0.37) <= 1e-6


def test_kernel_matrix_matches_pointwise_values():
    grid = make_grid(1, [0.0, 1.0], 9)
    xs = grid.nodes[:, 0]
    for family in (Family.SECOND_ORDER_1D, Family.FOURTH_ORDER_1D):
        kernel = exact_kernel(family)
        matrix = exact_kernel_matrix(kernel, grid)
        expected = np.array([[kernel(x, xi) for xi in xs] for x in xs])
        np.testing.assert_allclose(matrix, expected, rtol=1e-12, atol=1e-16)


@pytest.mark.parametrize("x, xi", [(-0.1, 0.5), (0.5, 1.2), (float("nan"), 0.5)])
def test_out_of_range_arguments(x, xi):
    with pytest.raises(OracleDomainError):
        exact_greens_second_order(x, xi)
    with pytest.raises(OracleDomainError):
        exact_greens_beam(x, xi)


def test_no_oracle_for_other_families():
    with pytest.raises(OracleDomainError):
        exact_kernel(Family.SIXTH_ORDER_1D)
    with pytest.raises(OracleDomainError):
        exact_unit_load(Family.LAPLACE_2D, 0.5)
    with pytest.raises(OracleDomainError):
        exact_kernel_matrix(exact_kernel(Family.SECOND_ORDER_1D), make_grid(1, [0.0, 2.0], 5))
