"""Refinement study of discrete kernels against the exact 1D kernels."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..config import DEFAULT_CONFIG, LabConfig
from ..core.discretization import discretize, make_problem
from ..core.errors import OracleDomainError
from ..core.grid import make_grid
from ..core.kernel import build_greens_kernel, hs_norm
from ..core.linalg import factor_symmetric
from ..core.models import Family
from ..core.positivity import solve_unit_load
from ..oracles.exact import exact_kernel, exact_kernel_matrix, exact_unit_load

logger = logging.getLogger(__name__)

# Errors below this multiple of max|G| are rounding noise, not truncation error.
NOISE_FLOOR = 1e-10


@dataclass
class ConvergenceLevel:
    count: int
    spacing: float
    max_error: float
    ratio: Optional[float]
    nodally_exact: bool
    hs_norm: float
    unit_load_center: float
    unit_load_center_error: float


@dataclass
class ConvergenceReport:
    family: Family
    levels: List[ConvergenceLevel] = field(default_factory=list)

    @property
    def ratios(self) -> List[Optional[float]]:
        return [level.ratio for level in self.levels[1:]]

    @property
    def observed_order(self) -> Optional[float]:
        ratios = [r for r in self.ratios if r is not None and r > 0]
        if not ratios:
            return None
        return float(np.log2(np.mean(ratios)))


def _center_value(values: np.ndarray, xs: np.ndarray) -> float:
    """Unit-load value at x = 0.5 (exact node for odd counts, linear interpolation otherwise)."""
    return float(np.interp(0.5, xs, values))


def run_oracle_check(
    family: Family | str,
    ladder: Sequence[int],
    config: LabConfig = DEFAULT_CONFIG,
) -> ConvergenceReport:
    family = Family(family)
    exact = exact_kernel(family)
    if list(ladder) != sorted(set(ladder)):
        raise OracleDomainError(f"refinement ladder must be strictly increasing, got {list(ladder)}")

    report = ConvergenceReport(family=family)
    previous: Optional[float] = None
    for count in ladder:
        grid = make_grid(1, (0.0, 1.0), count)
        operator = discretize(make_problem(family, grid))
        factorization = factor_symmetric(operator.matrix, config.tolerances.sing)
        kernel = build_greens_kernel(operator, factorization)
        reference = exact_kernel_matrix(exact, grid)
        error = float(np.max(np.abs(kernel.K - reference)))
        floor = NOISE_FLOOR * float(np.max(np.abs(reference)))
        exact_at_nodes = error <= floor

        ratio = None
        if previous is not None and not exact_at_nodes and previous > floor:
            ratio = previous / error

        xs = grid.nodes[:, 0]
        center = _center_value(solve_unit_load(operator, factorization).values, xs)
        level = ConvergenceLevel(
            count=count,
            spacing=grid.spacing[0],
            max_error=error,
            ratio=ratio,
            nodally_exact=exact_at_nodes,
            hs_norm=hs_norm(kernel),
            unit_load_center=center,
            unit_load_center_error=abs(center - exact_unit_load(family, 0.5)),
        )
        report.levels.append(level)
        logger.info("%s N=%d error=%.3e ratio=%s", family.value, count, error, "-" if ratio is None else f"{ratio:.3f}")
        previous = error
    return report
