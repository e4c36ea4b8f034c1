"""Constant-potential sweeps that locate where positivity preservation breaks."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config import LabConfig
from ..core.discretization import discretize
from ..core.errors import NoConvergenceError, SingularMatrixError
from ..core.kernel import build_greens_kernel
from ..core.linalg import factor_symmetric, min_eigenvalue
from ..core.models import Verdict
from ..core.positivity import min_kernel_entry, row_mass_field
from .pipeline import AnalysisPipeline, problem_from_config
from .settings import RunConfig, SweepSettings

logger = logging.getLogger(__name__)

BISECTED = ("positivity_preserving", "row_mass_nonneg")
MAX_BISECTIONS = 200
HOLDS_TO_FAILS = "holds->fails"
FAILS_TO_HOLDS = "fails->holds"


@dataclass
class SweepPoint:
    index: int
    value: float
    admissible: bool
    lambda_min: Optional[float] = None
    verdicts: Dict[str, str] = field(default_factory=dict)
    min_kernel_entry: Optional[float] = None
    min_kernel_location: Optional[List[int]] = None
    min_row_mass: Optional[float] = None
    total_mass: Optional[float] = None
    equivalence_consistent: bool = True
    violations: List[str] = field(default_factory=list)
    witness: Optional[Dict[str, Any]] = None


@dataclass
class Threshold:
    """The verdict at `lower` is the one on the left of the change; it flips at `upper`."""

    verdict: str
    direction: str
    lower: float
    upper: float
    lambda_min: Optional[float]
    min_kernel_entry: Optional[float]
    min_row_mass: Optional[float]
    bisections: int

    @property
    def value(self) -> float:
        return self.upper


@dataclass
class SweepReport:
    param: str
    values: List[float]
    points: List[SweepPoint]
    thresholds: Dict[str, Optional[Threshold]]
    precision: float

    @property
    def equivalence_consistent(self) -> bool:
        return all(point.equivalence_consistent for point in self.points if point.admissible)

    @property
    def all_positive(self) -> bool:
        return all(point.verdicts.get("positive_operator") == Verdict.HOLDS.value for point in self.points)

    @property
    def violations(self) -> List[str]:
        return [f"{point.value:g}:{name}" for point in self.points for name in point.violations]


def sweep_values(settings: SweepSettings) -> List[float]:
    lo, hi = settings.range
    steps = settings.steps
    if not settings.log or hi <= 1.0:
        return [float(v) for v in np.linspace(lo, hi, steps)]
    if lo > 0.0:
        return [float(v) for v in np.geomspace(lo, hi, steps)]
    # non-positive start: evaluate lo itself, then a log ladder from 1
    start = 1.0
    return [float(lo)] + [float(v) for v in np.geomspace(start, hi, steps - 1)]


def _classify_point(config: RunConfig, lab: LabConfig, index: int, value: float) -> SweepPoint:
    problem = problem_from_config(config, c=value)
    seed = np.random.SeedSequence([lab.seed, index])
    result = AnalysisPipeline(problem=problem, config=lab, seed=seed).run()
    point = SweepPoint(index=index, value=value, admissible=result.admissible)
    if result.report is None:
        return point

    report = result.report
    entry = report.positivity_preserving
    point.lambda_min = report.lambda_min
    point.verdicts = {name: record.verdict.value for name, record in report.verdicts().items()}
    point.min_kernel_entry = entry.value
    point.min_kernel_location = list(entry.location) if entry.location else None
    point.min_row_mass = report.row_mass_nonneg.value
    point.total_mass = report.total_mass
    point.equivalence_consistent = report.equivalence_consistent
    point.violations = [check.name for check in report.violations]
    if report.witness is not None:
        point.witness = {
            "center": report.witness.center,
            "radius": report.witness.radius,
            "mean": report.witness.mean,
            "degenerate": report.witness.degenerate,
        }
    if not report.positive_operator.holds:
        logger.warning("c=%g: operator is not positive (lambda_min=%.6g)", value, report.lambda_min)
    return point


def _kernel_signs(config: RunConfig, lab: LabConfig, value: float) -> Dict[str, Any]:
    """Kernel-sign verdicts only; same tolerance policy as classify."""
    operator = discretize(problem_from_config(config, c=value))
    try:
        factorization = factor_symmetric(operator.matrix, lab.tolerances.sing)
    except SingularMatrixError:
        return {"admissible": False}
    kernel = build_greens_kernel(operator, factorization)
    entry, _ = min_kernel_entry(kernel)
    row_mass = row_mass_field(kernel).values
    tolerances = lab.tolerances
    return {
        "admissible": True,
        "min_kernel_entry": entry,
        "min_row_mass": float(row_mass.min()),
        "positivity_preserving": not tolerances.fails(entry, float(np.max(np.abs(kernel.K)))),
        "row_mass_nonneg": not tolerances.fails(float(row_mass.min()), float(np.max(np.abs(row_mass)))),
        "operator": operator,
    }


def _bisect(
    config: RunConfig,
    lab: LabConfig,
    verdict: str,
    lower: float,
    upper: float,
    precision: float,
    holds_below: bool = True,
) -> Threshold:
    steps = 0
    while upper - lower > precision * abs(upper) and steps < MAX_BISECTIONS:
        middle = 0.5 * (lower + upper)
        signs = _kernel_signs(config, lab, middle)
        if (signs["admissible"] and signs[verdict]) == holds_below:
            lower = middle
        else:
            upper = middle
        steps += 1
    final = _kernel_signs(config, lab, upper)
    lambda_min = None
    if final["admissible"]:
        operator = final["operator"]
        shift = float(np.min(operator.potential_values))
        try:
            lambda_min = min_eigenvalue(
                operator.matrix, lab.tolerances.eig, shift=shift, max_iter=lab.tolerances.max_iter
            ).value
        except NoConvergenceError as exc:
            logger.warning("c=%g: lambda_min did not converge: %s", upper, exc)
            lambda_min = exc.estimate
    direction = HOLDS_TO_FAILS if holds_below else FAILS_TO_HOLDS
    logger.info("%s %s threshold in [%.6g, %.6g] after %d bisections", verdict, direction, lower, upper, steps)
    return Threshold(
        verdict=verdict,
        direction=direction,
        lower=lower,
        upper=upper,
        lambda_min=lambda_min,
        min_kernel_entry=final.get("min_kernel_entry"),
        min_row_mass=final.get("min_row_mass"),
        bisections=steps,
    )


def _transitions(points: List[SweepPoint], verdict: str) -> List[Tuple[int, bool]]:
    """(index, holds on the left) for every neighbouring pair whose verdicts differ."""
    decided = (Verdict.HOLDS.value, Verdict.FAILS.value)
    changes = []
    for previous, current in zip(points, points[1:]):
        left, right = previous.verdicts.get(verdict), current.verdicts.get(verdict)
        if left in decided and right in decided and left != right:
            changes.append((current.index, left == Verdict.HOLDS.value))
    return changes


def run_sweep(
    config: RunConfig,
    lab: Optional[LabConfig] = None,
    progress: Optional[Callable[[SweepPoint], None]] = None,
) -> SweepReport:
    if config.sweep is None:
        raise ValueError("run_sweep needs sweep settings")
    lab = lab or config.lab_config
    settings = config.sweep
    values = sweep_values(settings)
    logger.info("sweeping %s over %d values with %d worker(s)", settings.param, len(values), lab.workers)

    with ThreadPoolExecutor(max_workers=lab.workers) as executor:
        points = list(executor.map(lambda item: _classify_point(config, lab, *item), enumerate(values)))
    if progress:
        for point in points:
            progress(point)

    thresholds: Dict[str, Optional[Threshold]] = {}
    for verdict in BISECTED:
        changes = _transitions(points, verdict)
        if not changes:
            thresholds[verdict] = None
            continue
        if len(changes) > 1:
            logger.warning("%s changes %d times across the sweep; bisecting the first", verdict, len(changes))
        index, holds_below = changes[0]
        thresholds[verdict] = _bisect(
            config, lab, verdict, values[index - 1], values[index], settings.bisect_precision, holds_below
        )

    report = SweepReport(
        param=settings.param,
        values=values,
        points=points,
        thresholds=thresholds,
        precision=settings.bisect_precision,
    )
    if not report.equivalence_consistent:
        logger.error("three-property verdicts disagree at some sweep point")
    return report
