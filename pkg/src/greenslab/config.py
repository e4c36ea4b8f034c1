from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

DEFAULT_SEED = 20240001
SCHEMA_VERSION = "greens-lab/1"


@dataclass(frozen=True)
class Tolerances:
    """Shared tolerance policy for every nonnegativity verdict and identity check."""

    eps_rel: float = 1e-8
    sing: float = 1e-8
    sym: float = 0.0
    eig: float = 1e-12
    quad: float = 1e-9
    identity: float = 1e-9
    max_iter: int = 10_000

    def fails(self, value: float, scale: float) -> bool:
        return value < -self.eps_rel * scale


@dataclass(frozen=True)
class SamplingConfig:
    quadratic_samples: int = 100
    bump_samples: int = 50
    noise_samples: int = 50
    positive_samples: int = 50
    bump_radii: Tuple[int, ...] = (2, 4, 8)


@dataclass
class LabConfig:
    """Runtime parameters shared by analyze / sweep / oracle-check."""

    tolerances: Tolerances = field(default_factory=Tolerances)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    seed: int = DEFAULT_SEED
    workers: int = 1


DEFAULT_CONFIG = LabConfig()

