"""Positivity classification of a discrete Green's kernel.

All nonnegativity verdicts share one policy: a value v fails iff
v < -eps_rel * scale, where the scale is max|K| for kernel entries,
max|row mass| for row masses and unit-load values, and
||f||_L1 * max|row mass| for the mean of a solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from ..config import DEFAULT_CONFIG, SamplingConfig, Tolerances
from .errors import NoConvergenceError, PreconditionViolated, WitnessConstructionFailed
from .grid import ensure_same_grid, field_from_values, integrate
from .kernel import apply_kernel
from .linalg import Factorization, factor_symmetric, min_eigenvalue, solve
from .models import (
    DiscreteOperator,
    Field,
    Grid,
    GreensKernel,
    PositivityReport,
    TheoremCheck,
    Verdict,
    VerdictRecord,
    WitnessF,
)

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]


@dataclass
class SomewherePositive:
    positive: bool
    max_value: float
    node: int


def quadratic_form(kernel: GreensKernel, z: Field) -> float:
    ensure_same_grid(kernel.grid, z.grid)
    wz = kernel.weights.w * z.values
    return float(np.dot(wz, kernel.K @ wz))


def total_mass(kernel: GreensKernel) -> float:
    """Quadratic form of the constant load 1."""
    return quadratic_form(kernel, Field(grid=kernel.grid, values=np.ones(kernel.size)))


def row_mass_field(kernel: GreensKernel) -> Field:
    return field_from_values(kernel.grid, kernel.K @ kernel.weights.w)


def solve_unit_load(op: DiscreteOperator, factorization: Optional[Factorization] = None) -> Field:
    factorization = factorization or factor_symmetric(op.matrix)
    return field_from_values(op.grid, solve(factorization, np.ones(op.size)))


def min_kernel_entry(kernel: GreensKernel) -> Tuple[float, Tuple[int, int]]:
    flat = int(np.argmin(kernel.K))
    i, j = divmod(flat, kernel.size)
    return float(kernel.K[i, j]), (i, j)


def _grid_distance(grid: Grid, center: int) -> np.ndarray:
    """Euclidean distance to `center` measured in grid units per axis."""
    offsets = (grid.nodes - grid.nodes[center]) / np.asarray(grid.spacing)
    return np.sqrt(np.sum(offsets**2, axis=1))


def bump_field(grid: Grid, center: int, radius: float) -> Field:
    """(1 - s^2)^2 with s = distance / radius inside the ball, zero outside."""
    s = _grid_distance(grid, center) / radius
    values = np.where(s < 1.0, (1.0 - s**2) ** 2, 0.0)
    return Field(grid=grid, values=values)


def _load_mean(kernel: GreensKernel, f: Field) -> float:
    return integrate(apply_kernel(kernel, f), kernel.weights)


def _l1(kernel: GreensKernel, f: Field) -> float:
    return float(np.dot(kernel.weights.w, np.abs(f.values)))


def bump_witness(kernel: GreensKernel, eps_rel: float = DEFAULT_CONFIG.tolerances.eps_rel) -> Optional[WitnessF]:
    """Nonnegative load with negative mean, built around the most negative row mass."""
    row_mass = row_mass_field(kernel).values
    scale = float(np.max(np.abs(row_mass)))
    if row_mass.min() >= -eps_rel * scale:
        return None

    grid = kernel.grid
    center = int(np.argmin(row_mass))
    distance = _grid_distance(grid, center)
    radius = 1
    while radius < max(grid.counts) and np.all(row_mass[distance < radius + 1] < 0):
        radius += 1

    for r in range(radius, 0, -1):
        if r == 1:
            values = np.zeros(grid.size)
            values[center] = 1.0 / kernel.weights.w[center]
            f = Field(grid=grid, values=values)
        else:
            f = bump_field(grid, center, float(r))
        mean = _load_mean(kernel, f)
        if mean < -eps_rel * _l1(kernel, f) * scale:
            support = int(np.count_nonzero(f.values))
            logger.debug("witness at node %d radius %d mean %.3e", center, r, mean)
            return WitnessF(f=f, center=center, radius=float(r), mean=mean, support_size=support, degenerate=r == 1)
    raise WitnessConstructionFailed(
        f"single-node load at node {center} has nonnegative mean although row mass is {row_mass[center]:.3e}"
    )


def somewhere_positive_check(
    kernel: GreensKernel,
    f: Field,
    lambda_min: Optional[float] = None,
) -> SomewherePositive:
    if np.any(f.values <= 0.0):
        raise PreconditionViolated(f"load is not strictly positive (min {f.values.min():.3e})")
    if lambda_min is None:
        if kernel.source is None:
            raise PreconditionViolated("kernel has no source operator to certify positivity")
        lambda_min = _lambda_min(kernel.source, DEFAULT_CONFIG.tolerances).value
    if lambda_min <= 0.0:
        raise PreconditionViolated(f"operator is not positive (lambda_min = {lambda_min:.6g})")
    u = apply_kernel(kernel, f)
    node = u.argmax()
    value = float(u.values[node])
    return SomewherePositive(positive=value > 0.0, max_value=value, node=node)


def _lambda_min(op: DiscreteOperator, tolerances: Tolerances):
    shift = float(np.min(op.potential_values)) if op.potential_values.size else 0.0
    return min_eigenvalue(op.matrix, tolerances.eig, shift=shift, max_iter=tolerances.max_iter)


def _sublattice(grid: Grid, count: int) -> List[int]:
    per_axis = int(np.ceil(count ** (1.0 / grid.dimension)))
    axes = [np.unique(np.linspace(0, n - 1, min(per_axis, n)).round().astype(int)) for n in grid.counts]
    if grid.dimension == 1:
        centers = list(axes[0])
    else:
        nx = grid.counts[0]
        centers = [int(i + nx * j) for j in axes[1] for i in axes[0]]
    return centers


def nonnegative_loads(grid: Grid, rng: np.random.Generator, sampling: SamplingConfig) -> Iterator[Field]:
    """Bumps on a coarse sublattice, then clamped Gaussian noise."""
    radii = sampling.bump_radii
    per_radius = -(-sampling.bump_samples // len(radii))
    emitted = 0
    for center in _sublattice(grid, per_radius):
        for radius in radii:
            if emitted == sampling.bump_samples:
                break
            yield bump_field(grid, center, float(radius))
            emitted += 1
    for _ in range(sampling.noise_samples):
        values = np.maximum(rng.standard_normal(grid.size), 0.0)
        if not values.any():
            values[rng.integers(grid.size)] = 1.0
        yield Field(grid=grid, values=values)


def _record(verdict: Verdict, value=None, location=None, grid: Optional[Grid] = None, **detail) -> VerdictRecord:
    coordinates = None
    if location is not None and grid is not None:
        coordinates = [grid.coordinates(index) for index in location]
    return VerdictRecord(verdict=verdict, value=value, location=location, coordinates=coordinates, detail=detail)


def _nonneg(value: float, scale: float, tolerances: Tolerances) -> Verdict:
    return Verdict.FAILS if tolerances.fails(value, scale) else Verdict.HOLDS


def classify(
    op: DiscreteOperator,
    kernel: GreensKernel,
    tolerances: Optional[Tolerances] = None,
    sampling: Optional[SamplingConfig] = None,
    seed: Seed = DEFAULT_CONFIG.seed,
    factorization: Optional[Factorization] = None,
) -> PositivityReport:
    tolerances = tolerances or DEFAULT_CONFIG.tolerances
    sampling = sampling or DEFAULT_CONFIG.sampling
    ensure_same_grid(op.grid, kernel.grid)
    rng = np.random.default_rng(seed)
    grid = kernel.grid
    w = kernel.weights.w
    factorization = factorization or factor_symmetric(op.matrix, tolerances.sing)
    checks: List[TheoremCheck] = []

    # positive operator
    principal = {}
    try:
        estimate = _lambda_min(op, tolerances)
        lambda_min = estimate.value
        positive = lambda_min > 0.0
        positive_record = _record(Verdict.HOLDS if positive else Verdict.FAILS, lambda_min, iterations=estimate.iterations)
    except NoConvergenceError as exc:
        logger.warning("lambda_min did not converge: %s", exc)
        estimate = None
        lambda_min = float("nan") if exc.estimate is None else exc.estimate
        positive = factorization.kind == "cholesky"
        positive_record = _record(Verdict.NOT_APPLICABLE, exc.estimate, reason=str(exc))
    checks.append(
        TheoremCheck(
            name="cholesky_agrees_with_lambda_min",
            applicable=estimate is not None,
            passed=estimate is None or positive == (factorization.kind == "cholesky"),
            value=lambda_min,
            note=f"factorization={factorization.kind}",
        )
    )

    # quadratic form: sampled z and the spectrum of W K W
    wkw = w[:, None] * kernel.K * w[None, :]
    spectrum = scipy.linalg.eigvalsh(wkw)
    wkw_norm = float(np.max(np.abs(spectrum)))
    wkw_min = float(spectrum[0])
    worst = np.inf
    for _ in range(sampling.quadratic_samples):
        z = rng.standard_normal(grid.size)
        value = quadratic_form(kernel, Field(grid=grid, values=z)) / (float(np.dot(z, z)) * wkw_norm)
        worst = min(worst, value)
    psd = worst >= -tolerances.quad and wkw_min >= -tolerances.quad * wkw_norm
    psd_record = _record(
        Verdict.HOLDS if psd else Verdict.FAILS,
        float(worst),
        samples=sampling.quadratic_samples,
        wkw_min=wkw_min,
        wkw_norm=wkw_norm,
    )
    checks.append(
        TheoremCheck(
            name="quadratic_form_nonnegative",
            applicable=positive,
            passed=psd,
            value=min(float(worst), wkw_min / wkw_norm),
            bound=-tolerances.quad,
        )
    )

    # kernel entries
    min_entry, pair = min_kernel_entry(kernel)
    kernel_scale = float(np.max(np.abs(kernel.K)))
    preserving_record = _record(
        _nonneg(min_entry, kernel_scale, tolerances), min_entry, pair, grid, scale=kernel_scale
    )

    # row mass and unit load
    row_mass = row_mass_field(kernel)
    row_scale = float(np.max(np.abs(row_mass.values)))
    row_node = row_mass.argmin()
    row_value = float(row_mass.values[row_node])
    row_record = _record(_nonneg(row_value, row_scale, tolerances), row_value, (row_node,), grid, scale=row_scale)

    unit_load = solve_unit_load(op, factorization)
    unit_node = unit_load.argmin()
    unit_value = float(unit_load.values[unit_node])
    unit_scale = float(np.max(np.abs(unit_load.values)))
    unit_record = _record(_nonneg(unit_value, row_scale, tolerances), unit_value, (unit_node,), grid, scale=row_scale)

    identity_gap = float(np.max(np.abs(row_mass.values - unit_load.values)))
    checks.append(
        TheoremCheck(
            name="row_mass_equals_unit_load",
            applicable=True,
            passed=identity_gap <= tolerances.identity * unit_scale,
            value=identity_gap,
            bound=tolerances.identity * unit_scale,
        )
    )

    # means of nonnegative loads
    witness: Optional[WitnessF] = None
    witness_note = ""
    if row_record.verdict is Verdict.FAILS:
        try:
            witness = bump_witness(kernel, tolerances.eps_rel)
        except WitnessConstructionFailed as exc:
            witness_note = str(exc)
            logger.error("%s", exc)
    checks.append(
        TheoremCheck(
            name="negative_row_mass_has_witness",
            applicable=row_record.verdict is Verdict.FAILS,
            passed=witness is not None,
            value=None if witness is None else witness.mean,
            note=witness_note,
        )
    )

    worst_mean = np.inf
    worst_ratio = np.inf
    failed = 0
    samples = 0
    loads = list(nonnegative_loads(grid, rng, sampling))
    if witness is not None:
        loads.append(witness.f)
    for f in loads:
        mean = _load_mean(kernel, f)
        bound = _l1(kernel, f) * row_scale
        samples += 1
        if tolerances.fails(mean, bound):
            failed += 1
        if bound and mean / bound < worst_ratio:
            worst_ratio = mean / bound
            worst_mean = mean
    mean_record = _record(
        Verdict.FAILS if failed else Verdict.HOLDS,
        float(worst_mean),
        samples=samples,
        failures=failed,
        worst_relative=float(worst_ratio),
    )

    verdicts = {row_record.verdict, unit_record.verdict, mean_record.verdict}
    consistent = len(verdicts) == 1
    checks.append(
        TheoremCheck(
            name="three_property_equivalence",
            applicable=True,
            passed=consistent,
            note=", ".join(f"{name}={record.verdict.value}" for name, record in (
                ("row_mass", row_record), ("unit_load", unit_record), ("mean_value", mean_record)
            )),
        )
    )

    mass = total_mass(kernel)
    checks.append(
        TheoremCheck(
            name="total_mass_nonnegative",
            applicable=positive,
            passed=mass >= -tolerances.quad * wkw_norm,
            value=mass,
            bound=-tolerances.quad * wkw_norm,
        )
    )
    unit_mean = integrate(unit_load, kernel.weights)
    checks.append(
        TheoremCheck(
            name="unit_load_mean_positive",
            applicable=positive,
            passed=unit_mean > 0.0,
            value=unit_mean,
            bound=0.0,
        )
    )

    # somewhere positive for strictly positive loads
    if positive:
        lowest = np.inf
        all_positive = True
        location = None
        positive_loads = [np.ones(grid.size)] + [
            0.1 + rng.random(grid.size) for _ in range(sampling.positive_samples)
        ]
        for values in positive_loads:
            result = somewhere_positive_check(kernel, Field(grid=grid, values=values), lambda_min)
            if result.max_value < lowest:
                lowest, location = result.max_value, result.node
            all_positive = all_positive and result.positive
        somewhere_record = _record(
            Verdict.HOLDS if all_positive else Verdict.FAILS,
            float(lowest),
            (location,),
            grid,
            samples=len(positive_loads),
        )
    else:
        somewhere_record = _record(Verdict.NOT_APPLICABLE, reason="operator is not positive")
    checks.append(
        TheoremCheck(
            name="positive_load_somewhere_positive",
            applicable=positive,
            passed=somewhere_record.verdict is not Verdict.FAILS,
            value=somewhere_record.value,
            bound=0.0,
        )
    )

    if estimate is not None and grid.size >= 2:
        # WKW = h^n A^-1 on a uniform grid: its eigenvalues are h^n / lambda_k
        second = grid.cell_volume / float(spectrum[-2]) if spectrum[-2] > 0 else None
        vector = estimate.vector
        floor = 1e-8 * float(np.max(np.abs(vector)))
        principal = {
            "lambda_1": lambda_min,
            "lambda_2": second,
            "gap": None if second is None else second - lambda_min,
            "one_signed": bool(np.all(vector >= -floor) or np.all(vector <= floor)),
        }

    report = PositivityReport(
        positive_operator=positive_record,
        psd_quadratic_form=psd_record,
        positivity_preserving=preserving_record,
        row_mass_nonneg=row_record,
        unit_load_nonneg=unit_record,
        mean_value_nonneg=mean_record,
        somewhere_positive=somewhere_record,
        total_mass=mass,
        lambda_min=lambda_min,
        equivalence_consistent=consistent,
        witness=witness,
        checks=checks,
        principal=principal,
    )
    for check in report.violations:
        logger.error("check %s failed (value=%s bound=%s) %s", check.name, check.value, check.bound, check.note)
    return report
