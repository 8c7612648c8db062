"""
Carriers for the product-of-Gaussians densities and their characteristic functions.
"""
import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from src.utils.errors import NotPositiveDefiniteError


class DensityCase(str, Enum):
    """Which vertex is shared: the general tetrahedron or the one pinned at the origin."""

    GENERAL = "general"
    PINNED = "pinned"

    @property
    def covariance(self) -> np.ndarray:
        """Cov of (b−a, c−a, d−a) for the general case and of (b−a, c−a, −a) when pinned."""
        if self is DensityCase.GENERAL:
            return np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]])
        return np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 1.0]])


class ComplexValue(NamedTuple):
    re: float
    im: float

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexValue":
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError(f"non-finite complex value {value}")
        return cls(value.real, value.imag)

    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.as_complex())

    @property
    def phase(self) -> float:
        return cmath.phase(self.as_complex())


@dataclass(frozen=True)
class MillerParams:
    """
    Partition of Σ⁻¹ = ((Ω, v), (v′, ω)) for Z = yX with (X, y) ~ N(0, Σ).

    Attributes:
        p: Dimension of X (always 2 here)
        omega_block: Ω, the p×p leading block
        v: The off-diagonal column
        omega: ω, the trailing scalar
        sqrt_det: √det(Σ⁻¹)
    """

    p: int
    omega_block: np.ndarray
    v: np.ndarray
    omega: float
    sqrt_det: float

    def __post_init__(self):
        block = np.asarray(self.omega_block, dtype=float)
        v = np.asarray(self.v, dtype=float).reshape(-1)
        object.__setattr__(self, "omega_block", block)
        object.__setattr__(self, "v", v)
        if block.shape != (self.p, self.p) or v.shape != (self.p,):
            raise ValueError(f"blocks do not match p={self.p}: Ω {block.shape}, v {v.shape}")
        if not np.allclose(block, block.T, rtol=0.0, atol=1e-14):
            raise NotPositiveDefiniteError("Ω is not symmetric")
        if not self.omega > 0.0 or not self.sqrt_det > 0.0:
            raise NotPositiveDefiniteError(f"ω={self.omega} and √det={self.sqrt_det} must be positive")
        try:
            np.linalg.cholesky(self.precision)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("Σ⁻¹ assembled from the blocks is not positive definite") from exc

    @property
    def precision(self) -> np.ndarray:
        """The assembled Σ⁻¹."""
        top = np.hstack([self.omega_block, self.v[:, None]])
        bottom = np.append(self.v, self.omega)[None, :]
        return np.vstack([top, bottom])
