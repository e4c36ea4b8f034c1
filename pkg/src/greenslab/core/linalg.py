"""Dense symmetric linear algebra behind G = A^-1.

Cholesky is tried first; indefinite matrices fall back to the Bunch-Kaufman
LDL^T factorization from LAPACK. Pivot sizes are recorded so a singular
operator is reported instead of silently inverted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DimensionError, NoConvergenceError, SingularMatrixError

logger = logging.getLogger(__name__)

DEFAULT_TOL_SING = 1e-8
DEFAULT_MAX_ITER = 10_000
REFINEMENT_STEPS = 3
RESIDUAL_FACTOR = 1e-10


@dataclass(frozen=True, eq=False)
class Factorization:
    kind: str  # cholesky / ldl
    lower: np.ndarray
    min_pivot: float
    scale: float
    matrix: np.ndarray
    block_diagonal: Optional[np.ndarray] = None
    perm: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def reconstruct(self) -> np.ndarray:
        if self.kind == "cholesky":
            return self.lower @ self.lower.T
        return self.lower @ self.block_diagonal @ self.lower.T


@dataclass(frozen=True, eq=False)
class Inverse:
    matrix: np.ndarray
    defect: float

    @property
    def relative_defect(self) -> float:
        scale = float(np.max(np.abs(self.matrix)))
        return self.defect / scale if scale else 0.0


@dataclass(frozen=True, eq=False)
class EigenEstimate:
    value: float
    iterations: int
    vector: np.ndarray
    shift: float = 0.0


def _as_square(matrix) -> np.ndarray:
    array = np.asarray(matrix, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {array.shape}")
    return array


def _block_pivots(d: np.ndarray) -> np.ndarray:
    """Eigenvalues of the 1x1 / 2x2 blocks of the LDL^T middle factor."""
    pivots = []
    index = 0
    size = d.shape[0]
    while index < size:
        if index + 1 < size and d[index + 1, index] != 0.0:
            pivots.extend(np.linalg.eigvalsh(d[index : index + 2, index : index + 2]))
            index += 2
        else:
            pivots.append(d[index, index])
            index += 1
    return np.asarray(pivots)


def factor_symmetric(matrix, tol_sing: float = DEFAULT_TOL_SING) -> Factorization:
    a = _as_square(matrix)
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("zero matrix", min_pivot=0.0)

    d = perm = None
    try:
        kind = "cholesky"
        lower = scipy.linalg.cholesky(a, lower=True, check_finite=True)
        pivots = np.diag(lower) ** 2
    except np.linalg.LinAlgError:
        logger.debug("cholesky failed, falling back to LDL^T (M=%d)", a.shape[0])
        kind = "ldl"
        lower, d, perm = scipy.linalg.ldl(a, lower=True)
        pivots = _block_pivots(d)

    min_pivot = float(np.min(np.abs(pivots)))
    if min_pivot < tol_sing * scale:
        raise SingularMatrixError(
            f"smallest pivot {min_pivot:.3e} below {tol_sing:.1e} * max|A| ({scale:.3e})",
            min_pivot=min_pivot,
        )
    return Factorization(
        kind=kind,
        lower=lower,
        min_pivot=min_pivot,
        scale=scale,
        matrix=a,
        block_diagonal=d,
        perm=perm,
    )


def _raw_solve(factorization: Factorization, rhs: np.ndarray) -> np.ndarray:
    if factorization.kind == "cholesky":
        return scipy.linalg.cho_solve((factorization.lower, True), rhs, check_finite=False)

    perm = factorization.perm
    triangular = factorization.lower[perm]
    y = scipy.linalg.solve_triangular(triangular, rhs[perm], lower=True, unit_diagonal=True)
    d = factorization.block_diagonal
    banded = np.zeros((3, d.shape[0]))
    banded[0, 1:] = np.diag(d, 1)
    banded[1] = np.diag(d)
    banded[2, :-1] = np.diag(d, -1)
    z = scipy.linalg.solve_banded((1, 1), banded, y)
    x = np.empty_like(z)
    x[perm] = scipy.linalg.solve_triangular(triangular.T, z, lower=False, unit_diagonal=True)
    return x


def _residual_ok(factorization: Factorization, rhs: np.ndarray, x: np.ndarray) -> bool:
    residual = rhs - factorization.matrix @ x
    r_norm = np.max(np.abs(residual), axis=0)
    x_norm = np.max(np.abs(x), axis=0)
    return bool(np.all(r_norm <= RESIDUAL_FACTOR * factorization.scale * x_norm))


def solve(factorization: Factorization, rhs) -> np.ndarray:
    """Solve A x = rhs; rhs may hold several right-hand sides as columns."""
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != factorization.size:
        raise DimensionError(f"rhs has {b.shape[0]} rows, matrix is {factorization.size}x{factorization.size}")
    x = _raw_solve(factorization, b)
    for _ in range(REFINEMENT_STEPS):
        if _residual_ok(factorization, b, x):
            break
        x = x + _raw_solve(factorization, b - factorization.matrix @ x)
    return x


def invert(factorization: Factorization) -> Inverse:
    raw = solve(factorization, np.eye(factorization.size))
    defect = float(np.max(np.abs(raw - raw.T)))
    return Inverse(matrix=0.5 * (raw + raw.T), defect=defect)


def _start_vector(size: int) -> np.ndarray:
    v = np.ones(size)
    return v / np.linalg.norm(v)


def _perturbed_start(size: int) -> np.ndarray:
    v = np.ones(size) + 0.1 * np.cos(np.arange(size) * 0.6180339887498949 * np.pi)
    return v / np.linalg.norm(v)


def _gershgorin_floor(a: np.ndarray) -> float:
    radii = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
    return float(np.min(np.diag(a) - radii))


def min_eigenvalue(
    matrix,
    tol: float = 1e-12,
    *,
    shift: float = 0.0,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenEstimate:
    """Smallest eigenvalue by shifted inverse power iteration.

    `shift` must lie below the spectrum; if A - shift*I is not positive
    definite the shift is moved to the Gershgorin lower bound.
    """
    a = _as_square(matrix)
    size = a.shape[0]
    scale = float(np.max(np.abs(a)))
    identity = np.eye(size)
    try:
        lower = scipy.linalg.cholesky(a - shift * identity, lower=True)
    except np.linalg.LinAlgError:
        floor = _gershgorin_floor(a)
        new_shift = floor - 1e-3 * max(scale, 1.0)
        logger.warning("shift %.6g is not below the spectrum; using Gershgorin shift %.6g", shift, new_shift)
        shift = new_shift
        lower = scipy.linalg.cholesky(a - shift * identity, lower=True)

    factor = (lower, True)
    v = _start_vector(size)
    w = scipy.linalg.cho_solve(factor, v)
    if abs(np.dot(v, w)) <= 1e-12 * np.linalg.norm(w):
        v = _perturbed_start(size)

    floor = 1e3 * np.finfo(float).eps * scale
    # rounding in v.Av is of order eps*|A|
    noise = 64 * np.finfo(float).eps * scale
    previous = float(v @ a @ v)
    for iteration in range(1, max_iter + 1):
        w = scipy.linalg.cho_solve(factor, v)
        v = w / np.linalg.norm(w)
        av = a @ v
        value = float(v @ av)
        residual = float(np.linalg.norm(av - value * v))
        if abs(value - previous) <= max(tol * abs(value), noise) and residual <= max(np.sqrt(tol) * abs(value), floor):
            v.setflags(write=False)
            return EigenEstimate(value=value, iterations=iteration, vector=v, shift=shift)
        previous = value
    raise NoConvergenceError(
        f"inverse iteration did not converge in {max_iter} iterations", iterations=max_iter, estimate=previous
    )
