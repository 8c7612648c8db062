"""
Parameters of the joint F-ratio tail and the registry entries of analytic answers.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class KrishnaiahParams(BaseModel):
    """(n, m, ρ, ξ) of the bivariate F-ratio tail; η = nξ / (m(1 − ρ²)) is derived."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    m: int = Field(ge=1)
    rho: float = Field(gt=-1.0, lt=1.0)
    xi: float = Field(ge=0.0)
    eta: Optional[float] = None

    @staticmethod
    def derive_eta(n: int, m: int, rho: float, xi: float) -> float:
        return n * xi / (m * (1.0 - rho * rho))

    @model_validator(mode="after")
    def _check_eta(self) -> "KrishnaiahParams":
        expected = self.derive_eta(self.n, self.m, self.rho, self.xi)
        if self.eta is None:
            object.__setattr__(self, "eta", expected)
        elif self.eta != expected:
            raise ValueError(f"eta={self.eta} does not match n*xi/(m*(1-rho^2))={expected}")
        return self

    @classmethod
    def reflected_cone(cls) -> "KrishnaiahParams":
        """n = m = 3, ρ = 1/3, ξ = 1/3 (so η = 3/8): the reflected-cone event."""
        return cls(n=3, m=3, rho=1.0 / 3.0, xi=1.0 / 3.0)


class QuantityName(str, Enum):
    REFLECTED_CONE = "reflected-cone"
    GAMMA_CONE = "gamma-cone"
    PINNED_QUADRANT = "pinned-quadrant"
    TRIANGLE_ACUTE = "triangle-acute"
    PINNED_TRIANGLE_ACUTE = "pinned-triangle-acute"
    PROJECTION_BETWEEN = "projection-between"
    PINNED_PROJECTION_BETWEEN = "pinned-projection-between"
    MEAN_VOLUME_GAUSSIAN = "mean-volume-gaussian"
    MEAN_VOLUME_BALL = "mean-volume-ball"
    MEAN_VOLUME_CUBE = "mean-volume-cube"
    CONE_GAP = "gamma-cone-minus-reflected-cone"


class Method(str, Enum):
    SERIES = "series"
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed-form"


class AnalyticQuantity(BaseModel):
    """A named constant with its error bound and how it was obtained."""

    model_config = ConfigDict(frozen=True)

    name: QuantityName
    value: float
    error_bound: float = Field(ge=0.0)
    method: Method
    evaluations: int = Field(default=0, ge=0)
    terms: int = Field(default=0, ge=0)


class SeriesEvaluation(BaseModel):
    """A series of quadratures: value, combined error bound and the work spent."""

    model_config = ConfigDict(frozen=True)

    value: float
    error_bound: float = Field(ge=0.0)
    terms: int = Field(ge=1)
    evaluations: int = Field(ge=0)
