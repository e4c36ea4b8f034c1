"""Validated run configuration for the lab CLI."""

from __future__ import annotations

import math
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import DEFAULT_CONFIG, DEFAULT_SEED, LabConfig, Tolerances
from ..core.discretization import constant_potential, gaussian_bump_potential
from ..core.models import Family


class ConstantPotential(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["constant"] = "constant"
    value: float = 0.0

    @property
    def label(self) -> str:
        return f"constant({self.value:g})"

    def function(self):
        return constant_potential(self.value)


class GaussianBumpPotential(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian-bump"] = "gaussian-bump"
    amplitude: float
    center: List[float]
    width: float = Field(gt=0)

    @property
    def label(self) -> str:
        center = ",".join(f"{c:g}" for c in self.center)
        return f"gaussian-bump(amplitude={self.amplitude:g}, center=({center}), width={self.width:g})"

    def function(self):
        return gaussian_bump_potential(self.amplitude, self.center, self.width)


PotentialSpec = Union[ConstantPotential, GaussianBumpPotential]


class ToleranceOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps_rel: Optional[float] = Field(default=None, gt=0)
    sing: Optional[float] = Field(default=None, ge=0)
    sym: Optional[float] = Field(default=None, ge=0)
    eig: Optional[float] = Field(default=None, gt=0)
    quad: Optional[float] = Field(default=None, gt=0)
    identity: Optional[float] = Field(default=None, gt=0)
    max_iter: Optional[int] = Field(default=None, gt=0)

    def apply(self, base: Tolerances) -> Tolerances:
        values = {key: value for key, value in self.model_dump().items() if value is not None}
        return Tolerances(**{**base.__dict__, **values})


class SweepSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    param: Literal["c"] = "c"
    range: Tuple[float, float]
    steps: int = Field(ge=2)
    log: bool = True
    bisect_precision: float = Field(default=1e-3, gt=0, lt=1)

    @field_validator("range")
    @classmethod
    def _finite_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = value
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("sweep range must be finite")
        if not hi > lo:
            raise ValueError(f"sweep range must satisfy lo < hi, got {lo}, {hi}")
        return value


class RunConfig(BaseModel):
    """Validated configuration of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    family: Family
    bounds: Optional[List[float]] = None
    counts: List[int] = Field(default_factory=lambda: [199])
    ladder: Optional[List[int]] = None
    potential: PotentialSpec = Field(default_factory=ConstantPotential, discriminator="kind")
    tolerances: ToleranceOverrides = Field(default_factory=ToleranceOverrides)
    seed: int = DEFAULT_SEED
    workers: int = Field(default=1, ge=1)
    sweep: Optional[SweepSettings] = None
    out: Optional[Path] = None
    heatmap: Optional[Path] = None
    heatmap_dir: Optional[Path] = None
    record_timings: bool = False

    @field_validator("counts")
    @classmethod
    def _positive_counts(cls, value: List[int]) -> List[int]:
        if not value or any(count < 3 for count in value):
            raise ValueError("every grid count must be >= 3")
        return value

    @field_validator("ladder")
    @classmethod
    def _increasing_ladder(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is None:
            return value
        if len(value) < 2:
            raise ValueError("refinement ladder needs at least two levels")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"refinement ladder must be strictly increasing, got {value}")
        return value

    @model_validator(mode="after")
    def _shape_matches_family(self) -> "RunConfig":
        dimension = self.family.dimension
        if self.bounds is None:
            self.bounds = [0.0, 1.0] * dimension
        if len(self.bounds) != 2 * dimension:
            raise ValueError(f"{self.family.value} needs {2 * dimension} bound values, got {len(self.bounds)}")
        if len(self.counts) == 1 and dimension == 2:
            self.counts = self.counts * 2
        if len(self.counts) != dimension:
            raise ValueError(f"{self.family.value} needs {dimension} grid counts, got {len(self.counts)}")
        return self

    @property
    def lab_config(self) -> LabConfig:
        return LabConfig(
            tolerances=self.tolerances.apply(DEFAULT_CONFIG.tolerances),
            sampling=DEFAULT_CONFIG.sampling,
            seed=self.seed,
            workers=self.workers,
        )

    def summary(self) -> dict:
        """JSON-ready echo of the configuration (output paths excluded)."""
        data = self.model_dump(mode="json", exclude={"out", "heatmap", "heatmap_dir", "record_timings"})
        return data
