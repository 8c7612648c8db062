"""
Analytic answers: the bivariate F-ratio tail series, the cone probabilities as quadrant
integrals of the triple-convolution densities, and the registry of exact constants.
"""
import functools
import math
from typing import List, Optional, Union

import numpy as np

from src.models.analytic import AnalyticQuantity, KrishnaiahParams, Method, QuantityName, SeriesEvaluation
from src.models.densities import DensityCase
from src.models.quadrature import Domain2D, QuadratureResult, QuadratureSpec
from src.models.sampling import MCEstimate, SamplerKind
from src.numerics.quadrature import integrate_2d, sum_series
from src.numerics.special_functions import log_gamma
from src.services.densities import triple_convolution_density
from src.services.events import MEAN_VOLUMES
from src.services.sampling import CHUNK, MonteCarloService
from src.utils.errors import ConvergenceError, DomainError, UnknownQuantityError
from src.utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_SERIES_REL_TOL = 1e-12
MAX_SERIES_TERMS = 200

CLOSED_FORMS = {
    QuantityName.TRIANGLE_ACUTE: 0.25,
    QuantityName.PROJECTION_BETWEEN: 0.5,
    QuantityName.PINNED_TRIANGLE_ACUTE: -0.5 + 1.0 / math.sqrt(2.0),
    QuantityName.PINNED_PROJECTION_BETWEEN: 1.0 / math.sqrt(2.0),
    QuantityName.MEAN_VOLUME_GAUSSIAN: MEAN_VOLUMES[SamplerKind.GAUSSIAN_TETRA],
    QuantityName.MEAN_VOLUME_BALL: MEAN_VOLUMES[SamplerKind.UNIFORM_BALL_TETRA],
    QuantityName.MEAN_VOLUME_CUBE: MEAN_VOLUMES[SamplerKind.UNIFORM_CUBE_TETRA],
}


def _require_converged(result: QuadratureResult, what: str) -> QuadratureResult:
    if not result.converged:
        raise ConvergenceError(
            f"{what}: quadrature stopped at error {result.error_estimate:.3g} "
            f"after {result.evaluations} evaluations"
        )
    return result


# ----------------------------------------------------------------------
# Bivariate F-ratio tail
# ----------------------------------------------------------------------
def lambda_k(k: int, n: int, m: int, eta: float, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """
    Λ_k = ∫_η^∞ ∫_η^∞ (xy)^{n/2+k−1} / (1+x+y)^{n+2k+m/2} dx dy, evaluated in log space.

    Raises:
        DomainError: negative k or η, or non-positive degrees
        ConvergenceError: the quadrature missed its tolerance
    """
    if k < 0 or n < 1 or m < 1:
        raise DomainError(f"need k >= 0 and n, m >= 1 (got k={k}, n={n}, m={m})")
    if not eta >= 0.0:
        raise DomainError(f"eta must be >= 0, got {eta}")
    power = n / 2.0 + k - 1.0
    decay = n + 2.0 * k + m / 2.0

    def integrand(x, y):
        log_value = -decay * np.log1p(x + y)
        if power != 0.0:
            with np.errstate(divide="ignore"):
                log_value = log_value + power * (np.log(x) + np.log(y))
        return np.exp(log_value)

    result = integrate_2d(integrand, Domain2D.quadrant_from(eta), spec)
    return _require_converged(result, f"Lambda_{k}(n={n}, m={m}, eta={eta})")


def lambda_k_at_zero(k: int, n: int, m: int) -> float:
    """Λ_k at η = 0 in closed form: Γ(n/2+k)² Γ(m/2) / Γ(n+2k+m/2)."""
    half = n / 2.0 + k
    return math.exp(2.0 * log_gamma(half) + log_gamma(m / 2.0) - log_gamma(n + 2.0 * k + m / 2.0))


def _log_series_coefficient(k: int, params: KrishnaiahParams) -> float:
    """log of ρ^{2k} Γ(n + m/2 + 2k) / (k! Γ(n/2 + k)), for ρ ≠ 0."""
    n, m = params.n, params.m
    return (
        2.0 * k * math.log(abs(params.rho))
        + log_gamma(n + m / 2.0 + 2.0 * k)
        - log_gamma(k + 1.0)
        - log_gamma(n / 2.0 + k)
    )


def krishnaiah_joint_tail(
    params: KrishnaiahParams,
    spec: QuadratureSpec = QuadratureSpec(),
    series_rel_tol: float = DEFAULT_SERIES_REL_TOL,
) -> SeriesEvaluation:
    """
    P(mσ̂₁₁/(nτ̂) > ξ and mσ̂₂₂/(nτ̂) > ξ)
        = (1 − ρ²)^{n/2} / (Γ(m/2)Γ(n/2)) · Σ_k ρ^{2k} Γ(n + m/2 + 2k) / (k! Γ(n/2 + k)) · Λ_k

    Each Λ_k is integrated on [η, ∞)² with its absolute tolerance divided by the size of
    its coefficient. Consecutive terms shrink at least by ρ², so the truncated tail is
    bounded by |last term| · ρ²/(1 − ρ²).

    Raises:
        ConvergenceError: a Λ_k quadrature or the series failed to converge
    """
    if series_rel_tol <= 0.0:
        raise DomainError("series_rel_tol must be positive")
    n, m, eta = params.n, params.m, params.eta
    log_prefactor = (n / 2.0) * math.log1p(-params.rho**2) - log_gamma(m / 2.0) - log_gamma(n / 2.0)
    prefactor = math.exp(log_prefactor)
    weighted_errors: List[float] = []
    evaluations = 0
    logger.debug(f"Krishnaiah tail: n={n}, m={m}, rho={params.rho}, xi={params.xi}, eta={eta}")

    def term(k: int) -> float:
        nonlocal evaluations
        if params.rho == 0.0 and k > 0:
            return 0.0
        if k == 0:
            log_coefficient = log_gamma(n + m / 2.0) - log_gamma(n / 2.0)
        else:
            log_coefficient = _log_series_coefficient(k, params)
        coefficient = math.exp(log_coefficient)
        term_spec = QuadratureSpec(
            abs_tol=spec.abs_tol / max(1.0, coefficient),
            rel_tol=spec.rel_tol,
            max_evaluations=spec.max_evaluations,
        )
        lam = lambda_k(k, n, m, eta, term_spec)
        evaluations += lam.evaluations
        weighted_errors.append(coefficient * lam.error_estimate)
        return coefficient * lam.value

    series = sum_series(term, rel_tol=series_rel_tol, max_terms=MAX_SERIES_TERMS)
    ratio = params.rho**2
    truncation = abs(series.last_term) * ratio / (1.0 - ratio)
    error_bound = prefactor * (math.fsum(weighted_errors) + truncation)
    value = prefactor * series.value
    logger.debug(f"Krishnaiah tail = {value:.12f} (+/- {error_bound:.3g}) from {series.terms} terms")
    return SeriesEvaluation(value=value, error_bound=error_bound, terms=series.terms, evaluations=evaluations)


def krishnaiah_mc_tail(
    params: KrishnaiahParams,
    n: int,
    seed: int,
    service: Optional[MonteCarloService] = None,
) -> MCEstimate:
    """
    Monte Carlo of the defining event: rows of X are N(0, ((1, ρ), (ρ, 1))), Y is an
    independent standard m-vector, σ̂_ii = X_i·X_i and τ̂ = Y·Y.
    """
    service = service or MonteCarloService()
    degrees, m, rho, xi = params.n, params.m, params.rho, params.xi
    shear = math.sqrt(1.0 - rho * rho)

    def draw_event(rng, count):
        x = rng.standard_normal((CHUNK, degrees, 2))[:count]
        y = rng.standard_normal((CHUNK, m))[:count]
        first = x[..., 0]
        second = rho * x[..., 0] + shear * x[..., 1]
        tau = np.sum(y * y, axis=-1)
        s11 = np.sum(first * first, axis=-1)
        s22 = np.sum(second * second, axis=-1)
        return (m * s11 > xi * degrees * tau) & (m * s22 > xi * degrees * tau)

    return service.probability_from_draws(seed, n, draw_event, name="krishnaiah-tail")


# ----------------------------------------------------------------------
# Cone probabilities
# ----------------------------------------------------------------------
def _quadrant_mass(case: DensityCase, spec: QuadratureSpec) -> QuadratureResult:
    result = integrate_2d(
        lambda z1, z2: triple_convolution_density(case, z1, z2), Domain2D.quadrant_from(0.0), spec
    )
    return _require_converged(result, f"{case.value} quadrant mass")


def gamma_cone_probability(spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """P(D̃ ∈ Γ): mass of the general triple-convolution density on the positive quadrant."""
    return _quadrant_mass(DensityCase.GENERAL, spec)


def pinned_quadrant_probability(spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Same quadrant mass for a tetrahedron pinned at the origin."""
    return _quadrant_mass(DensityCase.PINNED, spec)


def reflected_cone_probability(
    spec: QuadratureSpec = QuadratureSpec(),
    series_rel_tol: float = DEFAULT_SERIES_REL_TOL,
) -> SeriesEvaluation:
    return krishnaiah_joint_tail(KrishnaiahParams.reflected_cone(), spec, series_rel_tol)


def cone_gap(
    spec: QuadratureSpec = QuadratureSpec(),
    series_rel_tol: float = DEFAULT_SERIES_REL_TOL,
) -> AnalyticQuantity:
    """P(Γ) − P(reflected cone): close to, but not, zero."""
    gamma = gamma_cone_probability(spec)
    reflected = reflected_cone_probability(spec, series_rel_tol)
    return AnalyticQuantity(
        name=QuantityName.CONE_GAP,
        value=gamma.value - reflected.value,
        error_bound=gamma.error_estimate + reflected.error_bound,
        method=Method.QUADRATURE,
        evaluations=gamma.evaluations + reflected.evaluations,
        terms=reflected.terms,
    )


# ----------------------------------------------------------------------
# Registry
# ----------------------------------------------------------------------
@functools.lru_cache(maxsize=64)
def _constant(name: QuantityName, spec: QuadratureSpec, series_rel_tol: float) -> AnalyticQuantity:
    if name in CLOSED_FORMS:
        return AnalyticQuantity(name=name, value=CLOSED_FORMS[name], error_bound=0.0, method=Method.CLOSED_FORM)
    if name is QuantityName.REFLECTED_CONE:
        series = reflected_cone_probability(spec, series_rel_tol)
        return AnalyticQuantity(
            name=name,
            value=series.value,
            error_bound=series.error_bound,
            method=Method.SERIES,
            evaluations=series.evaluations,
            terms=series.terms,
        )
    if name is QuantityName.CONE_GAP:
        return cone_gap(spec, series_rel_tol)
    mass = gamma_cone_probability(spec) if name is QuantityName.GAMMA_CONE else pinned_quadrant_probability(spec)
    return AnalyticQuantity(
        name=name,
        value=mass.value,
        error_bound=mass.error_estimate,
        method=Method.QUADRATURE,
        evaluations=mass.evaluations,
    )


def constant(
    name: Union[str, QuantityName],
    spec: QuadratureSpec = QuadratureSpec(),
    series_rel_tol: float = DEFAULT_SERIES_REL_TOL,
) -> AnalyticQuantity:
    """
    Look up a named analytic quantity; closed forms carry error_bound 0.

    Raises:
        UnknownQuantityError: name is not a known quantity
        ConvergenceError: the underlying series or quadrature did not converge
    """
    try:
        quantity = QuantityName(name)
    except ValueError:
        raise UnknownQuantityError(f"unknown analytic quantity {name!r}") from None
    logger.debug(f"constant {quantity.value}: abs_tol={spec.abs_tol}, rel_tol={spec.rel_tol}")
    return _constant(quantity, spec, series_rel_tol)
