"""
Gamma, half-integer Bessel K and the F(2, 2) survival function.

Each function accepts a scalar or an array and returns the same shape; the domain
is checked up front so a bad argument never turns into a silent NaN.
"""
import numpy as np
from scipy.special import gammaln

from src.utils.errors import DomainError

SQRT_HALF_PI = np.sqrt(np.pi / 2.0)


def _as_real(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _unwrap(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def log_gamma(x):
    """log Γ(x) for x > 0."""
    arr = _as_real(x, "log_gamma argument")
    if np.any(arr <= 0.0):
        raise DomainError(f"log_gamma is defined here for x > 0 only, got {x!r}")
    return _unwrap(gammaln(arr))


def bessel_k_half(theta):
    """K_{1/2}(θ) = √(π/2) e^{−θ} / √θ for θ > 0."""
    arr = _as_real(theta, "bessel_k_half argument")
    if np.any(arr <= 0.0):
        raise DomainError(f"bessel_k_half needs θ > 0, got {theta!r}")
    return _unwrap(SQRT_HALF_PI * np.exp(-arr) / np.sqrt(arr))


def bessel_k_half_scaled(theta):
    """e^{θ} K_{1/2}(θ) = √(π/(2θ)), for folding e^{−θ} into a caller's exponent."""
    arr = _as_real(theta, "bessel_k_half_scaled argument")
    if np.any(arr <= 0.0):
        raise DomainError(f"bessel_k_half_scaled needs θ > 0, got {theta!r}")
    return _unwrap(SQRT_HALF_PI / np.sqrt(arr))


def f22_tail(x):
    """P(F > x) for F with (2, 2) degrees of freedom, i.e. 1 / (1 + x)."""
    arr = _as_real(x, "f22_tail argument")
    if np.any(arr < 0.0):
        raise DomainError(f"f22_tail needs x >= 0, got {x!r}")
    return _unwrap(1.0 / (1.0 + arr))
