from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

PointFunction = Callable[..., Any]


class Family(str, Enum):
    SECOND_ORDER_1D = "second-order-1d"
    FOURTH_ORDER_1D = "fourth-order-1d"
    SIXTH_ORDER_1D = "sixth-order-1d"
    LAPLACE_2D = "laplace-2d"
    BIHARMONIC_2D = "biharmonic-2d"

    @property
    def order(self) -> int:
        return {
            Family.SECOND_ORDER_1D: 2,
            Family.FOURTH_ORDER_1D: 4,
            Family.SIXTH_ORDER_1D: 6,
            Family.LAPLACE_2D: 2,
            Family.BIHARMONIC_2D: 4,
        }[self]

    @property
    def dimension(self) -> int:
        return 2 if self in (Family.LAPLACE_2D, Family.BIHARMONIC_2D) else 1


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


class Stage(str, Enum):
    GRID = "grid"
    OPERATOR = "operator"
    ADMISSIBILITY = "admissibility"
    KERNEL = "kernel"
    CLASSIFY = "classify"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Grid:
    """Interior nodes of an interval or axis-aligned rectangle.

    Boundary nodes are never stored: homogeneous Dirichlet data is encoded by
    eliminating them. In 2D the x index varies fastest.
    """

    dimension: int
    bounds: Tuple[Tuple[float, float], ...]
    counts: Tuple[int, ...]
    spacing: Tuple[float, ...]
    nodes: np.ndarray

    def __post_init__(self):
        _frozen(self.nodes)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def volume(self) -> float:
        return float(np.prod([b - a for a, b in self.bounds]))

    @property
    def key(self) -> Tuple:
        return (self.dimension, self.bounds, self.counts)

    def same_as(self, other: "Grid") -> bool:
        return self is other or self.key == other.key

    def coordinates(self, index: int) -> List[float]:
        return [float(v) for v in self.nodes[index]]


@dataclass(frozen=True, eq=False)
class Weights:
    grid: Grid
    w: np.ndarray

    def __post_init__(self):
        _frozen(self.w)

    @property
    def total(self) -> float:
        return float(np.sum(self.w))


@dataclass(frozen=True, eq=False)
class Field:
    """Grid function: one value per interior node."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        _frozen(self.values)

    def argmin(self) -> int:
        return int(np.argmin(self.values))

    def argmax(self) -> int:
        return int(np.argmax(self.values))


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    family: Family
    grid: Grid
    potential: Optional[PointFunction] = None
    potential_label: str = "zero"

    @property
    def order(self) -> int:
        return self.family.order


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Symmetric matrix of the operator on the interior unknowns."""

    matrix: np.ndarray
    spec: ProblemSpec
    potential_values: np.ndarray

    def __post_init__(self):
        _frozen(self.matrix)
        _frozen(self.potential_values)

    @property
    def grid(self) -> Grid:
        return self.spec.grid

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.matrix)))


@dataclass
class AdmissibilityReport:
    symmetry_defect: float
    invertible: bool
    min_pivot: Optional[float]
    relative_min_pivot: Optional[float]
    factorization: Optional[str]
    admissible: bool
    message: str = ""


@dataclass(frozen=True, eq=False)
class GreensKernel:
    """Discrete Green's function K[i, j] ~ G(x_i, x_j) with its quadrature."""

    K: np.ndarray
    grid: Grid
    weights: Weights
    source: Optional[DiscreteOperator] = None
    symmetry_defect: float = 0.0

    def __post_init__(self):
        _frozen(self.K)

    @property
    def size(self) -> int:
        return self.K.shape[0]


@dataclass
class VerdictRecord:
    verdict: Verdict
    value: Optional[float] = None
    location: Optional[Tuple[int, ...]] = None
    coordinates: Optional[List[List[float]]] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS


@dataclass
class WitnessF:
    """Nonnegative load whose solution has negative mean."""

    f: Field
    center: int
    radius: float
    mean: float
    support_size: int
    degenerate: bool = False


@dataclass
class TheoremCheck:
    name: str
    applicable: bool
    passed: bool
    value: Optional[float] = None
    bound: Optional[float] = None
    note: str = ""


@dataclass
class PositivityReport:
    positive_operator: VerdictRecord
    psd_quadratic_form: VerdictRecord
    positivity_preserving: VerdictRecord
    row_mass_nonneg: VerdictRecord
    unit_load_nonneg: VerdictRecord
    mean_value_nonneg: VerdictRecord
    somewhere_positive: VerdictRecord
    total_mass: float
    lambda_min: float
    equivalence_consistent: bool
    witness: Optional[WitnessF] = None
    checks: List[TheoremCheck] = field(default_factory=list)
    principal: Dict[str, Any] = field(default_factory=dict)

    def verdicts(self) -> Dict[str, VerdictRecord]:
        return {
            "positive_operator": self.positive_operator,
            "psd_quadratic_form": self.psd_quadratic_form,
            "positivity_preserving": self.positivity_preserving,
            "row_mass_nonneg": self.row_mass_nonneg,
            "unit_load_nonneg": self.unit_load_nonneg,
            "mean_value_nonneg": self.mean_value_nonneg,
            "somewhere_positive": self.somewhere_positive,
        }

    @property
    def violations(self) -> List[TheoremCheck]:
        return [check for check in self.checks if check.applicable and not check.passed]


@dataclass
class StageEvent:
    """Progress record emitted by the analysis pipeline."""

    stage: Stage
    payload: Dict[str, Any]
    elapsed: float = 0.0
