"""Finite-difference assembly of the clamped operator menu.

Every matrix is built from small integer stencils (exact in floating point) and
scaled by a single power of the spacing afterwards, so symmetry is exact rather
than restored after the fact.
"""

from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import NonFiniteValueError, SingularMatrixError, StencilError
from .grid import ensure_same_grid, field_from_values, sample_field
from .linalg import Factorization, factor_symmetric
from .models import AdmissibilityReport, DiscreteOperator, Family, Field, Grid, PointFunction, ProblemSpec

logger = logging.getLogger(__name__)

# Half stencils (center first) of the positive operators (-D^2)^p.
STENCILS: Dict[int, Tuple[int, ...]] = {
    2: (2, -1),
    4: (6, -4, 1),
    6: (20, -15, 6, -1),
}

# Ghost folding per order: ghost offset k (node -k) -> (sign, interior index).
# Order 4: u_{-1} = u_1 gives u'(0) = 0 to second order.
# Order 6: ghosts are zero, which imposes u = u' = u'' = 0.
GHOSTS: Dict[int, Tuple[Tuple[int, int, int], ...]] = {
    2: (),
    4: ((1, 1, 1),),
    6: (),
}


def make_problem(
    family: Family | str,
    grid: Grid,
    potential: Optional[PointFunction] = None,
    potential_label: Optional[str] = None,
) -> ProblemSpec:
    family = Family(family)
    if grid.dimension != family.dimension:
        raise StencilError(f"{family.value} needs a {family.dimension}D grid, got {grid.dimension}D")
    if not family.order > grid.dimension / 2:
        raise StencilError(f"{family.value}: order {family.order} must exceed n/2 = {grid.dimension / 2}")
    label = potential_label or ("zero" if potential is None else "custom")
    return ProblemSpec(family=family, grid=grid, potential=potential, potential_label=label)


def stencil_matrix(order: int, count: int) -> np.ndarray:
    """Integer matrix of (-D^2)^(order/2) on `count` interior nodes with clamped ghosts."""
    half = STENCILS[order]
    matrix = np.zeros((count, count))
    for offset, coefficient in enumerate(half):
        if offset >= count:
            break
        diagonal = np.full(count - offset, float(coefficient))
        matrix += np.diag(diagonal, offset)
        if offset:
            matrix += np.diag(diagonal, -offset)
    for ghost, sign, node in GHOSTS[order]:
        # row r sees u_{-ghost} at stencil offset r + 1 + ghost; folds land on the diagonal
        for row in range(count):
            reach = row + 1 + ghost
            if reach >= len(half):
                break
            value = sign * half[reach]
            matrix[row, node - 1] += value
            matrix[count - 1 - row, count - node] += value
    return matrix


def _stencil_1d(order: int, count: int, spacing: float) -> np.ndarray:
    return stencil_matrix(order, count) / spacing**order


def _assemble_principal(family: Family, grid: Grid) -> np.ndarray:
    if family.dimension == 1:
        (count,) = grid.counts
        (h,) = grid.spacing
        return _stencil_1d(family.order, count, h)

    nx, ny = grid.counts
    hx, hy = grid.spacing
    ix, iy = np.eye(nx), np.eye(ny)
    lx, ly = stencil_matrix(2, nx), stencil_matrix(2, ny)
    if family is Family.LAPLACE_2D:
        return np.kron(iy, lx) / hx**2 + np.kron(ly, ix) / hy**2
    # 13-point stencil: D_xxxx + 2 D_xx D_yy + D_yyyy, clamped ghosts on each edge
    bx, by = stencil_matrix(4, nx), stencil_matrix(4, ny)
    return np.kron(iy, bx) / hx**4 + 2.0 * np.kron(ly, lx) / (hx**2 * hy**2) + np.kron(by, ix) / hy**4


def discretize(spec: ProblemSpec) -> DiscreteOperator:
    grid = spec.grid
    minimum = spec.order + 1
    if min(grid.counts) < minimum:
        raise StencilError(f"{spec.family.value} needs at least {minimum} nodes per axis, got {grid.counts}")

    matrix = _assemble_principal(spec.family, grid)
    if spec.potential is None:
        potential = np.zeros(grid.size)
    else:
        try:
            potential = sample_field(grid, spec.potential).values.copy()
        except NonFiniteValueError as exc:
            raise NonFiniteValueError(f"potential '{spec.potential_label}': {exc}") from exc
    matrix[np.diag_indices_from(matrix)] += potential
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteValueError(f"{spec.family.value}: assembled matrix has non-finite entries")
    logger.debug("assembled %s M=%d potential=%s", spec.family.value, grid.size, spec.potential_label)
    return DiscreteOperator(matrix=matrix, spec=spec, potential_values=potential)


def apply_operator(op: DiscreteOperator, field: Field) -> Field:
    ensure_same_grid(op.grid, field.grid)
    return field_from_values(op.grid, op.matrix @ field.values)


def admissibility_check(op: DiscreteOperator, tol_sym: float = 0.0, tol_sing: float = 1e-8) -> AdmissibilityReport:
    return checked_factorization(op, tol_sym, tol_sing)[0]


def checked_factorization(
    op: DiscreteOperator, tol_sym: float = 0.0, tol_sing: float = 1e-8
) -> Tuple[AdmissibilityReport, Optional[Factorization]]:
    """Admissibility report plus the factorization it was decided on (None when singular)."""
    defect = float(np.max(np.abs(op.matrix - op.matrix.T)))
    symmetric = defect <= tol_sym
    try:
        factorization = factor_symmetric(op.matrix, tol_sing)
    except SingularMatrixError as exc:
        scale = op.scale
        logger.info("operator %s is singular: %s", op.spec.family.value, exc)
        report = AdmissibilityReport(
            symmetry_defect=defect,
            invertible=False,
            min_pivot=exc.min_pivot,
            relative_min_pivot=exc.min_pivot / scale if scale else None,
            factorization=None,
            admissible=False,
            message=str(exc),
        )
        return report, None
    message = "" if symmetric else f"symmetry defect {defect:.3e} exceeds {tol_sym:.3e}"
    report = AdmissibilityReport(
        symmetry_defect=defect,
        invertible=True,
        min_pivot=factorization.min_pivot,
        relative_min_pivot=factorization.min_pivot / factorization.scale,
        factorization=factorization.kind,
        admissible=symmetric,
        message=message,
    )
    return report, factorization


def constant_potential(value: float) -> PointFunction:
    def _constant(*coords):
        return np.full(np.shape(coords[0]), float(value))

    return _constant


def gaussian_bump_potential(amplitude: float, center: Sequence[float], width: float) -> PointFunction:
    center = np.asarray(center, dtype=float).reshape(-1)

    def _bump(*coords):
        r2 = sum((np.asarray(x, dtype=float) - c) ** 2 for x, c in zip(coords, center))
        return amplitude * np.exp(-r2 / (2.0 * width**2))

    return _bump
