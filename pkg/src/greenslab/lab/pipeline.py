from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from ..config import DEFAULT_CONFIG, LabConfig
from ..core.discretization import checked_factorization, discretize, make_problem
from ..core.grid import make_grid
from ..core.kernel import build_greens_kernel, hs_norm
from ..core.models import (
    AdmissibilityReport,
    DiscreteOperator,
    Field,
    GreensKernel,
    PositivityReport,
    ProblemSpec,
    Stage,
    StageEvent,
)
from ..core.positivity import classify, row_mass_field, solve_unit_load
from .settings import ConstantPotential, RunConfig

logger = logging.getLogger(__name__)

StageHandler = Callable[[StageEvent], None]


@dataclass
class AnalysisResult:
    problem: ProblemSpec
    operator: DiscreteOperator
    admissibility: AdmissibilityReport
    kernel: Optional[GreensKernel] = None
    report: Optional[PositivityReport] = None
    hs_norm: Optional[float] = None
    unit_load: Optional[Field] = None
    row_mass: Optional[Field] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return self.admissibility.admissible


def problem_from_config(config: RunConfig, counts: Optional[List[int]] = None, c: Optional[float] = None) -> ProblemSpec:
    """Grid and potential described by a run configuration; `c` replaces the potential by a constant."""
    grid = make_grid(config.family.dimension, config.bounds, counts or config.counts)
    if c is not None:
        potential = ConstantPotential(value=c)
    else:
        potential = config.potential
    return make_problem(config.family, grid, potential.function(), potential.label)


@dataclass
class AnalysisPipeline:
    """grid -> operator -> admissibility -> kernel -> classification for one problem."""

    problem: ProblemSpec
    config: LabConfig = field(default_factory=lambda: DEFAULT_CONFIG)
    seed: Optional[Union[int, np.random.SeedSequence]] = None
    stage_handlers: List[StageHandler] = field(default_factory=list)

    def run(self) -> AnalysisResult:
        tolerances = self.config.tolerances
        timings: Dict[str, float] = {}
        grid = self.problem.grid
        self._emit(Stage.GRID, {"counts": list(grid.counts), "size": grid.size}, 0.0)

        started = time.perf_counter()
        operator = discretize(self.problem)
        timings["operator"] = time.perf_counter() - started
        self._emit(
            Stage.OPERATOR,
            {"family": self.problem.family.value, "potential": self.problem.potential_label},
            timings["operator"],
        )

        started = time.perf_counter()
        admissibility, factorization = checked_factorization(operator, tolerances.sym, tolerances.sing)
        timings["admissibility"] = time.perf_counter() - started
        self._emit(
            Stage.ADMISSIBILITY,
            {"admissible": admissibility.admissible, "factorization": admissibility.factorization},
            timings["admissibility"],
        )
        result = AnalysisResult(problem=self.problem, operator=operator, admissibility=admissibility, timings=timings)
        if not admissibility.admissible or factorization is None:
            logger.warning("operator %s is not admissible: %s", self.problem.family.value, admissibility.message)
            return result

        started = time.perf_counter()
        kernel = build_greens_kernel(operator, factorization)
        result.kernel = kernel
        result.hs_norm = hs_norm(kernel)
        result.unit_load = solve_unit_load(operator, factorization)
        result.row_mass = row_mass_field(kernel)
        timings["kernel"] = time.perf_counter() - started
        self._emit(
            Stage.KERNEL,
            {"hs_norm": result.hs_norm, "symmetry_defect": kernel.symmetry_defect},
            timings["kernel"],
        )

        started = time.perf_counter()
        seed = self.config.seed if self.seed is None else self.seed
        result.report = classify(operator, kernel, tolerances, self.config.sampling, seed, factorization)
        timings["classify"] = time.perf_counter() - started
        self._emit(
            Stage.CLASSIFY,
            {
                "lambda_min": result.report.lambda_min,
                "consistent": result.report.equivalence_consistent,
                "violations": [check.name for check in result.report.violations],
            },
            timings["classify"],
        )
        return result

    def attach_handler(self, handler: StageHandler):
        self.stage_handlers.append(handler)

    def _emit(self, stage: Stage, payload: Dict, elapsed: float):
        event = StageEvent(stage=stage, payload=payload, elapsed=elapsed)
        for handler in self.stage_handlers:
            handler(event)
