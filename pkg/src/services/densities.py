"""
Densities and characteristic functions of products of correlated Gaussians, and the
dihedral/solid-angle densities of random tetrahedra.

Two covariance cases are covered (see DensityCase): the general tetrahedron, where
Z = yX with (x1, x2, y) = (b−a, c−a, d−a), and the pinned one, where y = −a.
"""
import functools
import math
from typing import Callable, Tuple

import numpy as np
from scipy import integrate

from src.models.densities import ComplexValue, DensityCase, MillerParams
from src.models.quadrature import Domain2D, QuadratureResult, QuadratureSpec
from src.numerics.quadrature import integrate_1d, integrate_2d, integrate_cumulative
from src.numerics.special_functions import bessel_k_half_scaled
from src.services.sampling import CHUNK, MonteCarloService
from src.utils.errors import DomainError, NotPositiveDefiniteError
from src.utils.logger import get_logger

logger = get_logger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
TWO_PI = 2.0 * math.pi
MIN_CHARFUN_TRIALS = 100_000

# Below this distance from π the Crofton density switches to its series about π.
CROFTON_SERIES_RADIUS = 0.05
# Numerator coefficients of h⁴ ... h⁹ about x = π + h (the lower ones vanish).
CROFTON_SERIES = (0.25, -math.pi / 30.0, 0.0, math.pi / 630.0, -1.0 / 2880.0, -math.pi / 30240.0)
CROFTON_TABLE_POINTS = 4097


# ----------------------------------------------------------------------
# Miller product density
# ----------------------------------------------------------------------
def miller_params_from_cov(sigma) -> MillerParams:
    """
    Invert Σ and partition Σ⁻¹ = ((Ω, v), (v′, ω)).

    Raises:
        NotPositiveDefiniteError: Σ is not symmetric positive definite
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] < 2:
        raise DomainError(f"covariance must be a square matrix of size >= 2, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
        raise NotPositiveDefiniteError("covariance is not symmetric")
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("covariance is not positive definite") from exc

    precision = np.linalg.inv(sigma)
    precision = 0.5 * (precision + precision.T)
    p = sigma.shape[0] - 1
    return MillerParams(
        p=p,
        omega_block=precision[:p, :p],
        v=precision[:p, p],
        omega=float(precision[p, p]),
        sqrt_det=float(1.0 / math.sqrt(np.linalg.det(sigma))),
    )


def miller_density(params: MillerParams, z):
    """
    2√det(Σ⁻¹)/(2π)^{(p+1)/2} (ω/Z′ΩZ)^{(p−1)/4} exp(−v′Z) K_{(p−1)/2}(√(ω Z′ΩZ)) for p = 2.

    Raises:
        DomainError: p != 2, or z is the origin (where the density is singular)
    """
    if params.p != 2:
        raise DomainError("only the p = 2 density (Bessel order 1/2) is available")
    z = np.asarray(z, dtype=float)
    quad_form = np.einsum("...i,ij,...j->...", z, params.omega_block, z)
    if np.any(quad_form <= 0.0):
        raise DomainError("Miller density is singular at the origin")
    scale = 2.0 * params.sqrt_det / TWO_PI ** ((params.p + 1) / 2.0)
    theta = np.sqrt(params.omega * quad_form)
    # e^{−v′Z} and the e^{−θ} of K_{1/2} share one exp; apart they overflow to inf·0 in the tails
    value = (
        scale
        * (params.omega / quad_form) ** ((params.p - 1) / 4.0)
        * bessel_k_half_scaled(theta)
        * np.exp(-(z @ params.v) - theta)
    )
    return float(value) if np.ndim(value) == 0 else value


def miller_density_simplified(case: DensityCase, z1, z2):
    """Closed forms of miller_density for the two covariance cases."""
    z1, z2 = np.asarray(z1, dtype=float), np.asarray(z2, dtype=float)
    if case is DensityCase.GENERAL:
        s = 3.0 * z1 * z1 - 2.0 * z1 * z2 + 3.0 * z2 * z2
        value = np.exp(0.25 * (z1 + z2 - SQRT3 * np.sqrt(s))) / np.sqrt(s) / TWO_PI
    else:
        s = z1 * z1 + z2 * z2
        value = np.exp(z1 + z2 - SQRT3 * np.sqrt(s)) / np.sqrt(s) / TWO_PI
    if np.any(s == 0.0):
        raise DomainError("Miller density is singular at the origin")
    return float(value) if np.ndim(value) == 0 else value


def triple_convolution_density(case: DensityCase, z1, z2):
    """Density of the sum of three independent copies of Z; finite everywhere."""
    z1, z2 = np.asarray(z1, dtype=float), np.asarray(z2, dtype=float)
    if case is DensityCase.GENERAL:
        root = np.sqrt(3.0 * z1 * z1 - 2.0 * z1 * z2 + 3.0 * z2 * z2)
        value = np.exp(0.25 * (z1 + z2 - SQRT3 * root)) / (4.0 * SQRT3 * math.pi)
    else:
        value = np.exp(z1 + z2 - SQRT3 * np.hypot(z1, z2)) / (2.0 * SQRT3 * math.pi)
    return float(value) if np.ndim(value) == 0 else value


def whole_plane_mass(density: Callable, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Integral of a vectorised f(z1, z2) over the plane."""
    return integrate_2d(density, Domain2D.whole_plane(), spec)


def miller_normalization(case: DensityCase, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    params = miller_params_from_cov(case.covariance)

    def density(z1, z2):
        z = np.stack([z1, z2], axis=-1)
        return miller_density(params, z)

    return whole_plane_mass(density, spec)


def conv3_normalization(case: DensityCase, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    return whole_plane_mass(lambda z1, z2: triple_convolution_density(case, z1, z2), spec)


# ----------------------------------------------------------------------
# Characteristic functions
# ----------------------------------------------------------------------
def radicand(case: DensityCase, u, v):
    """R(u, v): F = R^{−1/2} and G = R^{−3/2}."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    if case is DensityCase.GENERAL:
        return (u - 1j) * (3.0 * u + 1j) + (v - 1j) * (3.0 * v + 1j) + 2.0 * u * v - 1.0
    return (u - 1j) ** 2 + (v - 1j) ** 2 + 3.0


def _charfun_values(case: DensityCase, u, v) -> np.ndarray:
    return 1.0 / np.sqrt(radicand(case, u, v))


def _charfun_g_values(case: DensityCase, u, v) -> np.ndarray:
    return np.power(radicand(case, u, v), -1.5)


def charfun(case: DensityCase, u: float, v: float) -> ComplexValue:
    """F(u, v) = E exp(i(uZ1 + vZ2)), principal branch."""
    return ComplexValue.from_complex(complex(_charfun_values(case, u, v)))


def charfun_g(case: DensityCase, u: float, v: float) -> ComplexValue:
    """G(u, v) = R^{−3/2}, the transform of the triple convolution."""
    return ComplexValue.from_complex(complex(_charfun_g_values(case, u, v)))


def charfun_identity_check(case: DensityCase, u_grid, v_grid) -> float:
    """max |F³ − G| over the tensor grid u_grid × v_grid."""
    u, v = np.meshgrid(np.asarray(u_grid, dtype=float), np.asarray(v_grid, dtype=float), indexing="ij")
    deviation = np.abs(_charfun_values(case, u, v) ** 3 - _charfun_g_values(case, u, v))
    return float(deviation.max())


def min_radicand_modulus(case: DensityCase, u_grid, v_grid) -> float:
    """Smallest |R| on the grid; the principal root is safe while this stays away from 0."""
    u, v = np.meshgrid(np.asarray(u_grid, dtype=float), np.asarray(v_grid, dtype=float), indexing="ij")
    return float(np.abs(radicand(case, u, v)).min())


def _product_draws(case: DensityCase, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
    if case is DensityCase.GENERAL:
        a, b, c, d = rng.standard_normal((4, CHUNK))[:, :count]
        y = d - a
    else:
        a, b, c = rng.standard_normal((3, CHUNK))[:, :count]
        y = -a
    return y * (b - a), y * (c - a)


def charfun_mc(
    case: DensityCase,
    u: float,
    v: float,
    n: int,
    seed: int,
    service: MonteCarloService = None,
) -> ComplexValue:
    """Empirical mean of exp(i(u z1 + v z2)) over n draws of Z."""
    if n < MIN_CHARFUN_TRIALS:
        raise DomainError(f"charfun Monte Carlo needs n >= {MIN_CHARFUN_TRIALS}, got {n}")
    service = service or MonteCarloService()

    def work(rng, count):
        z1, z2 = _product_draws(case, rng, count)
        phase = u * z1 + v * z2
        return math.fsum(np.cos(phase)), math.fsum(np.sin(phase))

    parts = service.map_chunks(seed, n, work)
    return ComplexValue(math.fsum(p[0] for p in parts) / n, math.fsum(p[1] for p in parts) / n)


def charfun_mc_check(
    case: DensityCase,
    u: float,
    v: float,
    n: int,
    seed: int,
    service: MonteCarloService = None,
) -> float:
    """|empirical characteristic function − F(u, v)|; expected below 4/√n."""
    empirical = charfun_mc(case, u, v, n, seed, service)
    return abs(empirical.as_complex() - charfun(case, u, v).as_complex())


def _complex_integral_1d(f: Callable[[float], complex], lo: float, hi: float, spec: QuadratureSpec):
    real = integrate_1d(lambda t: f(t).real, lo, hi, spec)
    imag = integrate_1d(lambda t: f(t).imag, lo, hi, spec)
    return complex(real.value, imag.value), real.converged and imag.converged


def charfun_polar(
    case: DensityCase,
    u: float,
    v: float,
    power: int = 1,
    spec: QuadratureSpec = QuadratureSpec(),
) -> ComplexValue:
    """
    F (power=1) or G (power=3) from the forward transform written in polar coordinates,
    where the radial integral is elementary and one angular quadrature remains:

        pinned   F = −(1/2π) ∫ dθ / c(θ),       G = (1/(2√3π)) ∫ dθ / c(θ)²,
                 c(θ) = (1+iu)cos θ + (1+iv)sin θ − √3
        general  F = −(1/(√2π)) ∫ dθ / c(θ),     G = (2/(√6π)) ∫ dθ / c(θ)²,
                 c(θ) = cos θ + 2i(u+v)cos θ + √2 i(u−v)sin θ − √3
    """
    if power not in (1, 3):
        raise DomainError("power must be 1 (F) or 3 (G)")
    if case is DensityCase.PINNED:
        def c(theta):
            return (1 + 1j * u) * math.cos(theta) + (1 + 1j * v) * math.sin(theta) - SQRT3
        factor = -1.0 / TWO_PI if power == 1 else 1.0 / (2.0 * SQRT3 * math.pi)
    else:
        def c(theta):
            return (
                math.cos(theta)
                + 2j * (u + v) * math.cos(theta)
                + SQRT2 * 1j * (u - v) * math.sin(theta)
                - SQRT3
            )
        factor = -1.0 / (SQRT2 * math.pi) if power == 1 else 2.0 / (math.sqrt(6.0) * math.pi)

    exponent = 1 if power == 1 else 2
    value, converged = _complex_integral_1d(lambda t: 1.0 / c(t) ** exponent, 0.0, TWO_PI, spec)
    if not converged:
        logger.warning(f"charfun_polar did not converge at ({u}, {v})")
    return ComplexValue.from_complex(factor * value)


def conv3_transform(
    case: DensityCase,
    u: float,
    v: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> ComplexValue:
    """∫∫ exp(i(u z1 + v z2)) · triple_convolution_density dz by 2D quadrature; equals G(u, v)."""
    def part(trig):
        return lambda z1, z2: trig(u * z1 + v * z2) * triple_convolution_density(case, z1, z2)

    real = whole_plane_mass(part(np.cos), spec)
    imag = whole_plane_mass(part(np.sin), spec)
    if not (real.converged and imag.converged):
        logger.warning(f"conv3_transform did not converge at ({u}, {v})")
    return ComplexValue(real.value, imag.value)


# ----------------------------------------------------------------------
# Dihedral and solid-angle densities
# ----------------------------------------------------------------------
def _miles_support(x, y, z) -> np.ndarray:
    return (x + y + z > math.pi) & (x + y < math.pi + z) & (y + z < math.pi + x) & (z + x < math.pi + y)


def miles_joint_density(x, y, z):
    """
    Joint density of the pinned dihedral angles (α, β, γ):

        −(1/π)·cos((x+y+z)/2)cos((−x+y+z)/2)cos((x−y+z)/2)cos((x+y−z)/2) / (sin²x sin²y sin²z)

    on its support, 0 elsewhere. The leading minus sign makes the density nonnegative:
    on the support the first cosine is negative and the other three are positive.

    Raises:
        DomainError: an argument lies outside (0, π)
    """
    x, y, z = (np.asarray(t, dtype=float) for t in (x, y, z))
    for t in (x, y, z):
        if np.any((t <= 0.0) | (t >= math.pi)):
            raise DomainError("dihedral angles must lie in (0, π)")
    product = (
        np.cos((x + y + z) / 2.0)
        * np.cos((-x + y + z) / 2.0)
        * np.cos((x - y + z) / 2.0)
        * np.cos((x + y - z) / 2.0)
    )
    sines = (np.sin(x) * np.sin(y) * np.sin(z)) ** 2
    value = np.where(_miles_support(x, y, z), -product / (math.pi * sines), 0.0)
    return float(value) if np.ndim(value) == 0 else value


def _miles_value(x: float, y: float, z: float) -> float:
    """Scalar miles_joint_density without the domain check, for nested quadrature."""
    if not (x + y + z > math.pi and x + y < math.pi + z and y + z < math.pi + x and z + x < math.pi + y):
        return 0.0
    product = (
        math.cos((x + y + z) / 2.0)
        * math.cos((-x + y + z) / 2.0)
        * math.cos((x - y + z) / 2.0)
        * math.cos((x + y - z) / 2.0)
    )
    return -product / (math.pi * (math.sin(x) * math.sin(y) * math.sin(z)) ** 2)


def _miles_z_range(x: float, y: float) -> Tuple[float, float]:
    return abs(x + y - math.pi), math.pi - abs(x - y)


def miles_marginal(x: float, y: float, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Density of (α, β): the joint density integrated over γ."""
    lo, hi = _miles_z_range(x, y)
    if not lo < hi:
        return 0.0
    result = integrate_1d(lambda z: miles_joint_density(x, y, z), lo, hi, spec)
    return result.value


def miles_normalization(abs_tol: float = 1e-8, rel_tol: float = 1e-8) -> QuadratureResult:
    """Triple integral of miles_joint_density over its support (scipy tplquad)."""
    value, error = integrate.tplquad(
        lambda z, y, x: _miles_value(x, y, z),
        0.0,
        math.pi,
        0.0,
        math.pi,
        lambda x, y: _miles_z_range(x, y)[0],
        lambda x, y: max(_miles_z_range(x, y)),
        epsabs=abs_tol,
        epsrel=rel_tol,
    )
    spec = QuadratureSpec(abs_tol=abs_tol, rel_tol=rel_tol)
    return QuadratureResult(
        value=value,
        error_estimate=error,
        evaluations=0,
        converged=error <= spec.target(value),
        spec=spec,
    )


def _crofton_near_pi(h: float) -> float:
    numerator = sum(coef * h ** (power + 4) for power, coef in enumerate(CROFTON_SERIES))
    if h == 0.0:
        return CROFTON_SERIES[0] / math.pi
    return numerator / (16.0 * math.pi * math.sin(h / 2.0) ** 4)


def _crofton_direct(x: float) -> float:
    quadratic = x * x - 4.0 * math.pi * x + 3.0 * math.pi**2
    numerator = (
        (quadratic - 6.0) * math.cos(x)
        - 6.0 * (x - TWO_PI) * math.sin(x)
        - 2.0 * (quadratic + 3.0)
    )
    return -numerator / (16.0 * math.pi * math.cos(x / 2.0) ** 4)


def crofton_density(x, include_endpoints: bool = False):
    """
    Density of the solid angle at the pinned vertex, on (0, 2π):

        −((x² − 4πx + 3π² − 6)cos x − 6(x − 2π)sin x − 2(x² − 4πx + 3π² + 3)) / (16π cos⁴(x/2))

    Numerator and denominator both vanish to fourth order at x = π; within
    CROFTON_SERIES_RADIUS of π the numerator's series about π is used instead.

    With include_endpoints the formula's continuous extension is returned at 0 and 2π,
    so tabulation grids may start at 0.

    Raises:
        DomainError: x outside (0, 2π), or outside [0, 2π] with include_endpoints
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("solid angle must be finite")
    if include_endpoints:
        if np.any((arr < 0.0) | (arr > TWO_PI)):
            raise DomainError("solid angle must lie in [0, 2π]")
    elif np.any((arr <= 0.0) | (arr >= TWO_PI)):
        raise DomainError("solid angle must lie in (0, 2π)")

    def one(value: float) -> float:
        h = value - math.pi
        if abs(h) < CROFTON_SERIES_RADIUS:
            return _crofton_near_pi(h)
        return _crofton_direct(value)

    if arr.ndim == 0:
        return one(float(arr))
    return np.vectorize(one, otypes=[float])(arr)


@functools.lru_cache(maxsize=1)
def _crofton_table() -> Tuple[np.ndarray, np.ndarray, QuadratureResult]:
    grid = np.linspace(0.0, TWO_PI, CROFTON_TABLE_POINTS)
    cumulative, total = integrate_cumulative(crofton_density, grid, QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12))
    logger.debug(f"Crofton CDF table: total mass {total.value:.12f}")
    return grid, cumulative, total


def crofton_cdf(x):
    """CDF of crofton_density by cumulative quadrature on a fine table, linearly interpolated."""
    grid, cumulative, _ = _crofton_table()
    arr = np.asarray(x, dtype=float)
    value = np.interp(arr, grid, cumulative, left=0.0, right=cumulative[-1])
    return float(value) if arr.ndim == 0 else value


def crofton_normalization(spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    return integrate_1d(crofton_density, 0.0, TWO_PI, spec, points=(math.pi,))
