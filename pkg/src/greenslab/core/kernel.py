from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from .grid import ensure_same_grid, field_from_values, quadrature_weights
from .linalg import DEFAULT_TOL_SING, Factorization, factor_symmetric, invert
from .models import DiscreteOperator, Field, GreensKernel

logger = logging.getLogger(__name__)


def build_greens_kernel(
    op: DiscreteOperator,
    factorization: Optional[Factorization] = None,
    tol_sing: float = DEFAULT_TOL_SING,
) -> GreensKernel:
    """K = A^-1 W^-1, so that sum_j K[i, j] w_j f_j is the quadrature of (Gf)(x_i)."""
    weights = quadrature_weights(op.grid)
    factorization = factorization or factor_symmetric(op.matrix, tol_sing)
    inverse = invert(factorization)
    kernel = inverse.matrix / op.grid.cell_volume
    defect = inverse.relative_defect
    logger.debug("kernel M=%d symmetry defect %.3e", op.size, defect)
    return GreensKernel(K=kernel, grid=op.grid, weights=weights, source=op, symmetry_defect=defect)


def apply_kernel(kernel: GreensKernel, f: Field) -> Field:
    ensure_same_grid(kernel.grid, f.grid)
    return field_from_values(kernel.grid, kernel.K @ (kernel.weights.w * f.values))


def kernel_symmetry_defect(kernel_raw) -> float:
    raw = np.asarray(kernel_raw, dtype=float)
    scale = float(np.max(np.abs(raw))) if raw.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(raw - raw.T))) / scale


def hs_norm(kernel: GreensKernel) -> float:
    w = kernel.weights.w
    value = float(np.sqrt(w @ (kernel.K**2) @ w))
    if not np.isfinite(value):
        logger.error("Hilbert-Schmidt norm is not finite")
    return value
