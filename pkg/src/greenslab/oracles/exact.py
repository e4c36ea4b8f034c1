"""Reference Green's functions on [0, 1] for the 1D clamped families."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from ..core.errors import OracleDomainError
from ..core.models import Family, Grid

logger = logging.getLogger(__name__)

KernelFunction = Callable[[float, float], float]


def _check_unit_interval(*values: float):
    for value in values:
        if not (0.0 <= value <= 1.0):
            raise OracleDomainError(f"oracle argument {value!r} outside [0, 1]")


def exact_greens_second_order(x: float, xi: float) -> float:
    """G for -u'' with u(0) = u(1) = 0."""
    _check_unit_interval(x, xi)
    return x * (1.0 - xi) if x <= xi else xi * (1.0 - x)


@lru_cache(maxsize=4096)
def _beam_coefficients(xi: float) -> Tuple[np.ndarray, np.ndarray]:
    """Cubic coefficients (ascending powers) left and right of xi.

    Unknowns are a0..a3 (x <= xi) and b0..b3 (x >= xi). Rows: clamped at 0,
    clamped at 1, value / slope / curvature continuous at xi, third
    derivative jumps by +1 at xi.
    """
    value = np.array([xi**k for k in range(4)])
    slope = np.array([0.0, 1.0, 2.0 * xi, 3.0 * xi**2])
    curvature = np.array([0.0, 0.0, 2.0, 6.0 * xi])
    third = np.array([0.0, 0.0, 0.0, 6.0])
    zero = np.zeros(4)

    system = np.array(
        [
            np.concatenate([[1.0, 0.0, 0.0, 0.0], zero]),
            np.concatenate([[0.0, 1.0, 0.0, 0.0], zero]),
            np.concatenate([zero, [1.0, 1.0, 1.0, 1.0]]),
            np.concatenate([zero, [0.0, 1.0, 2.0, 3.0]]),
            np.concatenate([-value, value]),
            np.concatenate([-slope, slope]),
            np.concatenate([-curvature, curvature]),
            np.concatenate([-third, third]),
        ]
    )
    rhs = np.zeros(8)
    rhs[7] = 1.0
    coefficients = np.linalg.solve(system, rhs)
    left, right = coefficients[:4].copy(), coefficients[4:].copy()
    left.setflags(write=False)
    right.setflags(write=False)
    return left, right


def exact_greens_beam(x: float, xi: float) -> float:
    """G for u'''' with u = u' = 0 at both ends, from the cubic matching system."""
    _check_unit_interval(x, xi)
    left, right = _beam_coefficients(float(xi))
    coefficients = left if x <= xi else right
    return float(np.polynomial.polynomial.polyval(x, coefficients))


def exact_unit_load(family: Family | str, x: float) -> float:
    """Solution of A u = 1 with clamped conditions."""
    family = Family(family)
    _check_unit_interval(x)
    if family is Family.SECOND_ORDER_1D:
        return x * (1.0 - x) / 2.0
    if family is Family.FOURTH_ORDER_1D:
        return x**2 * (1.0 - x) ** 2 / 24.0
    raise OracleDomainError(f"no exact unit-load solution for {family.value}")


@dataclass(frozen=True)
class ExactKernel:
    family: Family
    evaluate: KernelFunction

    def __call__(self, x: float, xi: float) -> float:
        return self.evaluate(x, xi)

    def residual(self, xi: float, samples: int = 101, step: float = 1e-2) -> float:
        """Max |A_x G(x, xi)| over sample points away from xi and the boundary."""
        _check_unit_interval(xi)
        order = self.family.order
        stencil = _central_difference(order)
        reach = (len(stencil) // 2) * step
        xs = np.linspace(0.0, 1.0, samples)
        mask = (xs > reach) & (xs < 1.0 - reach) & (np.abs(xs - xi) > 2.0 * reach)
        worst = 0.0
        offsets = np.arange(len(stencil)) - len(stencil) // 2
        for x in xs[mask]:
            values = np.array([self(float(x + k * step), xi) for k in offsets])
            derivative = float(np.dot(stencil, values)) / step**order
            worst = max(worst, abs(derivative))
        return worst


def _central_difference(order: int) -> np.ndarray:
    # fourth-order accurate central weights
    if order == 2:
        return np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    if order == 4:
        return np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / 6.0
    raise OracleDomainError(f"no residual stencil for order {order}")


def exact_kernel(family: Family | str) -> ExactKernel:
    family = Family(family)
    if family is Family.SECOND_ORDER_1D:
        return ExactKernel(family=family, evaluate=exact_greens_second_order)
    if family is Family.FOURTH_ORDER_1D:
        return ExactKernel(family=family, evaluate=exact_greens_beam)
    raise OracleDomainError(f"no exact kernel for {family.value}; oracles cover 1D second and fourth order")


def exact_kernel_matrix(exact: ExactKernel, grid: Grid) -> np.ndarray:
    """Exact kernel sampled at every pair of interior nodes of a 1D grid on [0, 1]."""
    if grid.dimension != 1 or grid.bounds[0] != (0.0, 1.0):
        raise OracleDomainError(f"exact kernels live on [0, 1], got bounds {grid.bounds}")
    xs = grid.nodes[:, 0]
    if exact.family is Family.FOURTH_ORDER_1D:
        columns = []
        for xi in xs:
            left, right = _beam_coefficients(float(xi))
            columns.append(
                np.where(
                    xs <= xi,
                    np.polynomial.polynomial.polyval(xs, left),
                    np.polynomial.polynomial.polyval(xs, right),
                )
            )
        matrix = np.column_stack(columns)
    else:
        matrix = np.minimum.outer(xs, xs) * (1.0 - np.maximum.outer(xs, xs))
    logger.debug("sampled exact %s kernel on %d nodes", exact.family.value, xs.size)
    return matrix
