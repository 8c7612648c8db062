"""
Quadrature tolerances, results and integration domains.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class QuadratureSpec(BaseModel):
    """Absolute/relative tolerance and the global evaluation budget."""

    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=1e-11, gt=0.0)
    rel_tol: float = Field(default=1e-10, gt=0.0)
    max_evaluations: int = Field(default=5_000_000, ge=1_000)

    def target(self, value: float) -> float:
        """Error level that counts as converged for an integral of size value."""
        return max(self.abs_tol, self.rel_tol * abs(value))


class QuadratureResult(BaseModel):
    """Value, conservative error estimate and the work spent."""

    model_config = ConfigDict(frozen=True)

    value: float
    error_estimate: float = Field(ge=0.0)
    evaluations: int = Field(ge=0)
    converged: bool
    spec: QuadratureSpec = QuadratureSpec()

    @model_validator(mode="after")
    def _check_convergence_claim(self) -> "QuadratureResult":
        if self.converged and self.error_estimate > self.spec.target(self.value):
            raise ValueError("converged result must meet max(abs_tol, rel_tol*|value|)")
        return self


class SeriesResult(BaseModel):
    """Partial sum of a series with the number of terms used."""

    model_config = ConfigDict(frozen=True)

    value: float
    terms: int = Field(ge=1)
    last_term: float


@dataclass(frozen=True)
class Interval:
    """One axis of an integration domain; either end may be infinite."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def kind(self) -> str:
        lo_inf, hi_inf = math.isinf(self.lo), math.isinf(self.hi)
        if lo_inf and hi_inf:
            return "line"
        if hi_inf:
            return "upper"
        if lo_inf:
            return "lower"
        return "finite"


@dataclass(frozen=True)
class Domain2D:
    """Product of two intervals."""

    x: Interval
    y: Interval

    @classmethod
    def rectangle(cls, x_lo: float, x_hi: float, y_lo: float, y_hi: float) -> "Domain2D":
        return cls(Interval(x_lo, x_hi), Interval(y_lo, y_hi))

    @classmethod
    def quadrant_from(cls, eta: float = 0.0) -> "Domain2D":
        """[η, ∞) × [η, ∞)."""
        return cls(Interval(eta, math.inf), Interval(eta, math.inf))

    @classmethod
    def whole_plane(cls) -> "Domain2D":
        return cls(Interval(-math.inf, math.inf), Interval(-math.inf, math.inf))

    @property
    def axes(self) -> Tuple[Interval, Interval]:
        return self.x, self.y
