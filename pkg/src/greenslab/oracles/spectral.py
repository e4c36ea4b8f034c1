"""Truncated eigen-expansion of A^-1, an independent path to the kernel."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..core.errors import DimensionError, NoConvergenceError, PreconditionViolated
from ..core.linalg import DEFAULT_MAX_ITER, factor_symmetric, solve
from ..core.models import DiscreteOperator

logger = logging.getLogger(__name__)

GUARD_VECTORS = 5
START_SEED = 0


@dataclass(frozen=True, eq=False)
class EigenExpansion:
    K: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray
    iterations: int

    @property
    def lambda_1(self) -> float:
        return float(self.eigenvalues[0])


def eigen_expansion_kernel(
    op: DiscreteOperator,
    k_max: int,
    tol: float = 1e-10,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenExpansion:
    """sum_k phi_k phi_k^T / lambda_k over the k_max smallest eigenpairs, in kernel units.

    Block inverse iteration with Rayleigh-Ritz; a few guard vectors beyond
    k_max speed up convergence of the last wanted pair.
    """
    size = op.size
    if not 1 <= k_max <= size:
        raise DimensionError(f"k_max must lie in [1, {size}], got {k_max}")
    factorization = factor_symmetric(op.matrix)
    if factorization.kind != "cholesky":
        raise PreconditionViolated("eigen expansion needs a positive definite operator")

    a = op.matrix
    block = min(size, k_max + GUARD_VECTORS)
    start = np.random.default_rng(START_SEED).standard_normal((size, block))
    basis, _ = np.linalg.qr(start)
    threshold = tol * factorization.scale

    for iteration in range(1, max_iter + 1):
        basis, _ = np.linalg.qr(solve(factorization, basis))
        theta, ritz = scipy.linalg.eigh(basis.T @ a @ basis)
        basis = basis @ ritz
        wanted = basis[:, :k_max]
        residual = a @ wanted - wanted * theta[:k_max]
        worst = float(np.max(np.linalg.norm(residual, axis=0)))
        if worst <= threshold:
            logger.debug("eigen expansion k=%d converged in %d iterations", k_max, iteration)
            values = theta[:k_max].copy()
            kernel = (wanted / values) @ wanted.T / op.grid.cell_volume
            return EigenExpansion(K=kernel, eigenvalues=values, vectors=wanted, iterations=iteration)
    raise NoConvergenceError(
        f"subspace iteration for {k_max} eigenpairs did not converge in {max_iter} iterations",
        iterations=max_iter,
    )
