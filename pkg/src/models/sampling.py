"""
Sampler specifications and Monte Carlo results.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SamplerKind(str, Enum):
    GAUSSIAN_TETRA = "gaussian-tetra"
    PINNED_TETRA = "pinned-tetra"
    GAUSSIAN_TRIANGLE = "gaussian-triangle"
    PINNED_TRIANGLE = "pinned-triangle"
    UNIFORM_BALL_TETRA = "uniform-ball-tetra"
    UNIFORM_CUBE_TETRA = "uniform-cube-tetra"
    UNIFORM_PLANE_NORMAL = "uniform-plane-normal"

    @property
    def yields_tetrahedra(self) -> bool:
        return self in TETRA_KINDS

    @property
    def yields_triangles(self) -> bool:
        return self in (SamplerKind.GAUSSIAN_TRIANGLE, SamplerKind.PINNED_TRIANGLE)


TETRA_KINDS = frozenset({
    SamplerKind.GAUSSIAN_TETRA,
    SamplerKind.PINNED_TETRA,
    SamplerKind.UNIFORM_BALL_TETRA,
    SamplerKind.UNIFORM_CUBE_TETRA,
})


class SamplerSpec(BaseModel):
    """Which random object to draw and the 64-bit seed keying its stream."""

    model_config = ConfigDict(frozen=True)

    kind: SamplerKind
    seed: int = Field(ge=0, lt=2**64)


class MCEstimate(BaseModel):
    """A Monte Carlo probability or mean with its uncertainty and provenance."""

    model_config = ConfigDict(frozen=True)

    name: str = ""
    kind: Literal["probability", "mean"] = "probability"
    p_hat: float
    n: int = Field(ge=1)
    stderr: float = Field(ge=0.0)
    ci_low: float
    ci_high: float
    seed: int
    excluded: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "MCEstimate":
        if self.kind == "probability" and not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"probability estimate {self.p_hat} outside [0, 1]")
        if not self.ci_low <= self.p_hat <= self.ci_high:
            raise ValueError("confidence interval does not contain the estimate")
        return self

    @property
    def used(self) -> int:
        """Trials that entered the estimate (n minus degenerate exclusions)."""
        return self.n - self.excluded

    def z_score(self, target: float) -> float:
        """Distance from target in units of stderr (inf when stderr is 0 and they differ)."""
        diff = self.p_hat - target
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.stderr

    def agrees_with(self, target: float, k: float = 4.0) -> bool:
        return abs(self.z_score(target)) < k


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sample values sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float).ravel())
        object.__setattr__(self, "values", values)

    @property
    def count(self) -> int:
        return int(self.values.size)

    def cdf(self, x) -> np.ndarray:
        """Right-continuous empirical CDF."""
        return np.searchsorted(self.values, x, side="right") / self.count

    def mean(self) -> float:
        return float(self.values.mean())

    def stderr(self) -> float:
        return float(self.values.std(ddof=1) / math.sqrt(self.count)) if self.count > 1 else 0.0

