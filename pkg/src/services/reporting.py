"""
Report builder for the command-line front end: Monte Carlo estimates, analytic
constants and density grids, rendered as JSON reports or CSV tables.
"""
import math
import re
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from scipy import stats

from src.geometry import measures
from src.models.analytic import AnalyticQuantity, QuantityName
from src.models.config import Command, Report, ReportEntry, RunConfig
from src.models.densities import DensityCase
from src.models.quadrature import QuadratureSpec
from src.models.sampling import EmpiricalDistribution, MCEstimate, SamplerKind, SamplerSpec
from src.services import densities
from src.services.analytic import constant
from src.services.events import GAMMA_CONE, PINNED_QUADRANT, REFLECTED_CONE, STUDIES, resolve_event
from src.services.sampling import (
    MonteCarloService,
    chi_square_uniformity,
    ks_critical_value,
    ks_statistic,
    sample_correlations,
)
from src.utils.errors import DomainError, UnknownQuantityError
from src.utils.logger import get_logger
from src.utils.settings import get_settings

logger = get_logger(__name__)

MAX_GRID_POINTS = 1_000_000
GRID_DECIMALS = 12
CHI_SQUARE_BINS = 10

KNOWN_VALUES = {
    QuantityName.REFLECTED_CONE: REFLECTED_CONE,
    QuantityName.GAMMA_CONE: GAMMA_CONE,
    QuantityName.PINNED_QUADRANT: PINNED_QUADRANT,
    QuantityName.CONE_GAP: GAMMA_CONE - REFLECTED_CONE,
}

_AXIS = re.compile(r"^\s*([^:]+):([^:]+):([^:]+)\s*$")


# ----------------------------------------------------------------------
# Grids and output
# ----------------------------------------------------------------------
def parse_axis(text: str) -> np.ndarray:
    """Parse lo:hi:step into lo, lo+step, ... up to hi (inclusive when hi lands on the grid)."""
    match = _AXIS.match(text)
    if not match:
        raise DomainError(f"grid axis must look like lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(part) for part in match.groups())
    except ValueError:
        raise DomainError(f"grid axis has a non-numeric part: {text!r}") from None
    if not all(math.isfinite(v) for v in (lo, hi, step)) or step <= 0.0 or hi < lo:
        raise DomainError(f"grid axis needs finite lo <= hi and step > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if count > MAX_GRID_POINTS:
        raise DomainError(f"grid axis {text!r} has {count} points (limit {MAX_GRID_POINTS})")
    points = np.round(lo + step * np.arange(count), GRID_DECIMALS)
    return points + 0.0  # no negative zeros in the export


def parse_grid(text: str) -> List[np.ndarray]:
    """One axis, or two axes joined by "x" (e.g. -3:3:0.1x-3:3:0.1)."""
    if not text:
        raise DomainError("a grid is required")
    axes = [parse_axis(part) for part in text.split("x")]
    if len(axes) > 2:
        raise DomainError(f"grids have one or two axes, got {len(axes)}")
    if len(axes) == 2 and axes[0].size * axes[1].size > MAX_GRID_POINTS:
        raise DomainError(f"grid has more than {MAX_GRID_POINTS} points")
    return axes


def render(report: Report, output_format: str) -> str:
    """JSON (canonical) or a CSV table of the report entries."""
    if output_format == "csv":
        rows = [entry.model_dump(mode="json") for entry in report.results]
        return pd.DataFrame(rows, columns=list(ReportEntry.model_fields)).to_csv(index=False)
    return report.to_json()


def write_text(text: str, path: str) -> None:
    """Write UTF-8 text to a file."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"✅ Wrote {path}")


# ----------------------------------------------------------------------
# Report entries
# ----------------------------------------------------------------------
def estimate_entry(estimate: MCEstimate, target: Optional[float] = None, k: float = 4.0) -> ReportEntry:
    """A Monte Carlo estimate with stderr, Wilson/normal CI and, when known, its target."""
    detail = f"excluded={estimate.excluded}" if estimate.excluded else None
    return ReportEntry(
        name=estimate.name,
        value=estimate.p_hat,
        uncertainty=estimate.stderr,
        ci_low=estimate.ci_low,
        ci_high=estimate.ci_high,
        method="monte-carlo",
        n_or_evals=estimate.n,
        seed=estimate.seed,
        target=target,
        passed=None if target is None else estimate.agrees_with(target, k),
        detail=detail,
    )


def quantity_entry(quantity: AnalyticQuantity, target: Optional[float] = None, tol: float = 1e-8) -> ReportEntry:
    detail = f"terms={quantity.terms}" if quantity.terms else None
    return ReportEntry(
        name=quantity.name.value,
        value=quantity.value,
        uncertainty=quantity.error_bound,
        method=quantity.method.value,
        n_or_evals=quantity.evaluations,
        target=target,
        passed=None if target is None else abs(quantity.value - target) < tol,
        detail=detail,
    )


def run_event(service: MonteCarloService, name: str, n: int, seed: int, k: float = 4.0) -> ReportEntry:
    """Estimate a named event (probability or mean) and report it against its target."""
    event = resolve_event(name)
    spec = SamplerSpec(kind=event.sampler, seed=seed)
    if event.kind == "mean":
        estimate = service.estimate_mean(spec, event.evaluate, n, name=name)
    else:
        estimate = service.estimate_probability(spec, event.evaluate, n, name=name)
    return estimate_entry(estimate, event.target, k)


class ReportBuilder:
    """
    Runs one command from a RunConfig and returns its Report (or, for densities, a table).
    The report depends only on the config; thread count and wall time never enter it.
    """

    def __init__(self, service: Optional[MonteCarloService] = None):
        self.service = service or MonteCarloService()
        logger.debug(f"ReportBuilder using {self.service.threads} threads")

    # ------------------------------------------------------------------
    # estimate
    # ------------------------------------------------------------------
    def estimate(self, config: RunConfig) -> Report:
        """
        Raises:
            UnknownQuantityError: unknown event
            SamplerDegeneracyError: too many degenerate draws
        """
        name, n = config.name, config.n
        seed = get_settings().default_seed if config.seed is None else config.seed
        if name in STUDIES:
            results = self._study(name, n, seed)
        else:
            results = [run_event(self.service, name, n, seed)]
        return Report(command=Command.ESTIMATE.value, config=config.report_fields(), results=results)

    def _study(self, name: str, n: int, seed: int) -> List[ReportEntry]:
        if name == "solid-angle-samples":
            return solid_angle_study(self.service, n, seed)
        return dihedral_study(self.service, n, seed)

    # ------------------------------------------------------------------
    # analytic
    # ------------------------------------------------------------------
    def analytic(self, config: RunConfig) -> Report:
        """
        Raises:
            UnknownQuantityError: unknown quantity
            ConvergenceError: series or quadrature missed its tolerance
        """
        defaults = QuadratureSpec()
        spec = QuadratureSpec(
            abs_tol=config.abs_tol or defaults.abs_tol,
            rel_tol=config.rel_tol or defaults.rel_tol,
        )
        quantity = constant(config.name, spec)
        entry = quantity_entry(quantity, KNOWN_VALUES.get(quantity.name))
        return Report(command=Command.ANALYTIC.value, config=config.report_fields(), results=[entry])

    # ------------------------------------------------------------------
    # density
    # ------------------------------------------------------------------
    @staticmethod
    def density(config: RunConfig) -> pd.DataFrame:
        """
        Raises:
            UnknownQuantityError: unknown density name
            DomainError: malformed grid or grid outside the density's domain
        """
        return density_table(config.name, config.grid)


# ----------------------------------------------------------------------
# Density grids
# ----------------------------------------------------------------------
def _miller_on_grid(case: DensityCase) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    params = densities.miller_params_from_cov(case.covariance)

    def evaluate(z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        values = np.full(z1.shape, np.nan)
        away = (z1 != 0.0) | (z2 != 0.0)
        if np.any(away):
            values[away] = densities.miller_density(params, np.stack([z1[away], z2[away]], axis=-1))
        return values

    return evaluate


def _conv3_on_grid(case: DensityCase):
    return lambda z1, z2: np.asarray(densities.triple_convolution_density(case, z1, z2), dtype=float)


def _miles_marginal_on_grid(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if np.any((x <= 0.0) | (x >= math.pi) | (y <= 0.0) | (y >= math.pi)):
        raise DomainError("miles-marginal grids must lie inside (0, π)²")
    return np.array([densities.miles_marginal(float(a), float(b)) for a, b in zip(x, y)])


PLANAR_DENSITIES: Dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "miller-general": _miller_on_grid(DensityCase.GENERAL),
    "miller-pinned": _miller_on_grid(DensityCase.PINNED),
    "conv3-general": _conv3_on_grid(DensityCase.GENERAL),
    "conv3-pinned": _conv3_on_grid(DensityCase.PINNED),
    "miles-marginal": _miles_marginal_on_grid,
}
DENSITY_NAMES = tuple(PLANAR_DENSITIES) + ("crofton",)


def density_table(name: str, grid: str) -> pd.DataFrame:
    """
    Density values on a grid: columns x, density, cdf for crofton; x, y, density for the
    planar densities. Miller densities are singular at the origin and export NaN there.
    """
    if name not in DENSITY_NAMES:
        raise UnknownQuantityError(f"unknown density {name!r}; expected one of {', '.join(DENSITY_NAMES)}")
    axes = parse_grid(grid)
    if name == "crofton":
        if len(axes) != 1:
            raise DomainError("crofton takes a one-axis grid")
        x = axes[0]
        density = densities.crofton_density(x, include_endpoints=True)
        return pd.DataFrame({"x": x, "density": density, "cdf": densities.crofton_cdf(x)})

    if len(axes) != 2:
        raise DomainError(f"{name} takes a two-axis grid (lo:hi:stepxlo:hi:step)")
    x, y = (mesh.ravel() for mesh in np.meshgrid(axes[0], axes[1], indexing="ij"))
    logger.debug(f"density {name}: {x.size} grid points")
    return pd.DataFrame({"x": x, "y": y, "density": PLANAR_DENSITIES[name](x, y)})


# ----------------------------------------------------------------------
# Sample studies
# ----------------------------------------------------------------------
def _pinned_solid_angle(t):
    valid = ~measures.degenerate_tetra_mask(t)
    return measures.solid_angle(t.d, t.a, t.b, t.c, check=False), valid


def _pinned_dihedrals(t):
    valid = ~measures.degenerate_tetra_mask(t)
    return np.stack(measures.pinned_dihedral_angles(t.a, t.b, t.c), axis=-1), valid


def solid_angle_study(service: MonteCarloService, n: int, seed: int) -> List[ReportEntry]:
    """Solid angle at the pinned vertex: sample mean and the KS distance to the Crofton CDF."""
    spec = SamplerSpec(kind=SamplerKind.PINNED_TETRA, seed=seed)
    samples = service.collect_samples(spec, _pinned_solid_angle, n)
    statistic = ks_statistic(samples, densities.crofton_cdf)
    critical = ks_critical_value(samples.count)
    return [
        ReportEntry(
            name="solid-angle-samples:mean",
            value=samples.mean(),
            uncertainty=samples.stderr(),
            method="monte-carlo",
            n_or_evals=n,
            seed=seed,
        ),
        ReportEntry(
            name="solid-angle-samples:ks-crofton",
            value=statistic,
            uncertainty=critical,
            method="kolmogorov-smirnov",
            n_or_evals=samples.count,
            seed=seed,
            detail=f"1% critical value {critical:.6g}; {'below' if statistic < critical else 'above'} it",
        ),
    ]


def dihedral_study(service: MonteCarloService, n: int, seed: int, k: float = 4.0) -> List[ReportEntry]:
    """
    Pinned dihedral angles α, β, γ: KS of α against U[0, π], pairwise correlations
    against 0, and a chi-square grid test of (α, β) against the uniform square.
    """
    spec = SamplerSpec(kind=SamplerKind.PINNED_TETRA, seed=seed)
    values = service.collect_values(spec, _pinned_dihedrals, n)
    used = values.shape[0]
    alpha = EmpiricalDistribution(values[:, 0])
    uniform = stats.uniform(loc=0.0, scale=math.pi).cdf
    statistic = ks_statistic(alpha, uniform)
    critical = ks_critical_value(used)
    entries = [
        ReportEntry(
            name="dihedral-samples:ks-alpha-uniform",
            value=statistic,
            uncertainty=critical,
            method="kolmogorov-smirnov",
            n_or_evals=used,
            seed=seed,
            passed=statistic < critical,
        )
    ]

    correlations = sample_correlations(values)
    band = 1.0 / math.sqrt(used)
    for (i, j), label in zip(((0, 1), (0, 2), (1, 2)), ("alpha-beta", "alpha-gamma", "beta-gamma")):
        r = float(correlations[i, j])
        entries.append(
            ReportEntry(
                name=f"dihedral-samples:corr-{label}",
                value=r,
                uncertainty=band,
                method="pearson",
                n_or_evals=used,
                seed=seed,
                target=0.0,
                passed=abs(r) < k * band,
            )
        )

    chi2, p_value = chi_square_uniformity(values[:, 0], values[:, 1], CHI_SQUARE_BINS, 0.0, math.pi)
    dof = CHI_SQUARE_BINS * CHI_SQUARE_BINS - 1
    entries.append(
        ReportEntry(
            name="dihedral-samples:chi2-alpha-beta-uniform",
            value=chi2,
            uncertainty=math.sqrt(2.0 * dof),
            method="chi-square",
            n_or_evals=used,
            seed=seed,
            detail=f"dof={dof}; p={p_value:.3g}",
        )
    )
    return entries

