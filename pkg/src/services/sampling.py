"""
Monte Carlo service: counter-based samplers and deterministic parallel estimators.

Trials are grouped in fixed chunks of CHUNK consecutive indices. Chunk k is drawn
from a Philox generator keyed by the run seed with k in the high counter word, always
with the full chunk shape, so trial i is the same object no matter how the chunks are
spread over threads or how many trials the run asks for. Per-chunk tallies are
combined in chunk order.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Optional, Tuple, TypeVar, Union

import numpy as np
from scipy import stats

from src.models.geometry import Point3, Tetrahedron, Triangle
from src.models.sampling import EmpiricalDistribution, MCEstimate, SamplerKind, SamplerSpec
from src.utils.errors import DistributionError, DomainError, NonFiniteValueError, SamplerDegeneracyError
from src.utils.logger import get_logger
from src.utils.settings import get_settings

logger = get_logger(__name__)

CHUNK = 4096
MIN_TRIALS = 100
MIN_KS_SAMPLES = 1000
Z_95 = float(stats.norm.ppf(0.975))

T = TypeVar("T")
Sampled = Union[Tetrahedron, Triangle, np.ndarray]
# An event returns hit flags, or (hit flags, valid flags) when some draws must be excluded.
EventOutcome = Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """Independent stream for one chunk: Philox keyed by seed, counter starting at chunk · 2¹⁹²."""
    return np.random.Generator(np.random.Philox(key=seed, counter=chunk << 192))


def _draw_chunk(kind: SamplerKind, rng: np.random.Generator) -> np.ndarray:
    """Raw coordinates for CHUNK draws: (CHUNK, vertices, 3), or (CHUNK, 3) for plane normals."""
    if kind is SamplerKind.GAUSSIAN_TETRA:
        return rng.standard_normal((CHUNK, 4, 3))
    if kind is SamplerKind.PINNED_TETRA:
        free = rng.standard_normal((CHUNK, 3, 3))
        return np.concatenate([free, np.zeros((CHUNK, 1, 3))], axis=1)
    if kind is SamplerKind.GAUSSIAN_TRIANGLE:
        planar = rng.standard_normal((CHUNK, 3, 2))
        return np.concatenate([planar, np.zeros((CHUNK, 3, 1))], axis=2)
    if kind is SamplerKind.PINNED_TRIANGLE:
        planar = rng.standard_normal((CHUNK, 2, 2))
        free = np.concatenate([planar, np.zeros((CHUNK, 2, 1))], axis=2)
        return np.concatenate([free, np.zeros((CHUNK, 1, 3))], axis=1)
    if kind is SamplerKind.UNIFORM_BALL_TETRA:
        directions = rng.standard_normal((CHUNK, 4, 3))
        radii = rng.random((CHUNK, 4)) ** (1.0 / 3.0)
        lengths = np.linalg.norm(directions, axis=-1)
        return directions * (radii / lengths)[..., None]
    if kind is SamplerKind.UNIFORM_CUBE_TETRA:
        return rng.random((CHUNK, 4, 3))
    if kind is SamplerKind.UNIFORM_PLANE_NORMAL:
        normals = rng.standard_normal((CHUNK, 3))
        return normals / np.linalg.norm(normals, axis=-1, keepdims=True)
    raise DomainError(f"unknown sampler kind {kind!r}")


def _wrap(kind: SamplerKind, coords: np.ndarray) -> Sampled:
    if kind.yields_tetrahedra:
        return Tetrahedron(coords[:, 0], coords[:, 1], coords[:, 2], coords[:, 3])
    if kind.yields_triangles:
        return Triangle(coords[:, 0], coords[:, 1], coords[:, 2])
    return coords


def chunk_objects(kind: SamplerKind, rng: np.random.Generator, count: int) -> Sampled:
    """The first count objects of one chunk stream."""
    return _wrap(kind, _draw_chunk(kind, rng)[:count])


def draw_batch(spec: SamplerSpec, start: int, count: int) -> Sampled:
    """Trials start .. start+count−1 as one batch, identical to calling sample per index."""
    if start < 0 or count < 1:
        raise DomainError("start must be >= 0 and count >= 1")
    first, last = start // CHUNK, (start + count - 1) // CHUNK
    coords = np.concatenate(
        [_draw_chunk(spec.kind, chunk_generator(spec.seed, k)) for k in range(first, last + 1)]
    )
    offset = start - first * CHUNK
    return _wrap(spec.kind, coords[offset: offset + count])


def sample(spec: SamplerSpec, index: int) -> Union[Tetrahedron, Triangle, Point3]:
    """Trial number index of the stream; a pure function of (spec, index)."""
    batch = draw_batch(spec, index, 1)
    if isinstance(batch, np.ndarray):
        return Point3(*batch[0])
    return batch.take(0)


def wilson_interval(hits: int, n: int, z: float = Z_95) -> Tuple[float, float]:
    """Wilson score interval for hits successes out of n."""
    if n < 1:
        raise DomainError("Wilson interval needs n >= 1")
    p = hits / n
    z2n = z * z / n
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / n + z2n / (4.0 * n))
    low, high = max(0.0, center - half), min(1.0, center + half)
    return min(low, p), max(high, p)


def _split(outcome: EventOutcome, count: int) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(outcome, tuple):
        values, valid = outcome
        return np.asarray(values), np.asarray(valid, dtype=bool)
    values = np.asarray(outcome)
    return values, np.ones(count, dtype=bool)


class MonteCarloService:
    """
    Runs chunked Monte Carlo estimates on a thread pool.
    Results depend only on (seed, n); the thread count only changes wall time.
    """

    def __init__(self, threads: Optional[int] = None, max_excluded_fraction: Optional[float] = None):
        """
        Initialize the Monte Carlo service.

        Args:
            threads: Worker cap (default: GTET_THREADS from the settings)
            max_excluded_fraction: Abort threshold for degenerate draws (default from the settings)
        """
        settings = get_settings()
        self.threads = threads or settings.threads
        self.max_excluded_fraction = (
            settings.max_excluded_fraction if max_excluded_fraction is None else max_excluded_fraction
        )
        logger.debug(
            f"Monte Carlo service: threads={self.threads}, "
            f"max_excluded_fraction={self.max_excluded_fraction}"
        )

    # ------------------------------------------------------------------
    # chunk plumbing
    # ------------------------------------------------------------------
    def map_chunks(self, seed: int, n: int, work: Callable[[np.random.Generator, int], T]) -> List[T]:
        """
        Call work(rng, count) once per chunk of the n trials and return the results in chunk order.

        Args:
            seed: Run seed keying every chunk stream
            n: Total number of trials
            work: Receives the chunk generator and how many trials of the chunk to use
        """
        chunks = [(k, min(CHUNK, n - k * CHUNK)) for k in range((n + CHUNK - 1) // CHUNK)]

        def run(item):
            k, count = item
            return work(chunk_generator(seed, k), count)

        if self.threads == 1 or len(chunks) == 1:
            return [run(item) for item in chunks]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(run, chunks))

    def _sampler_work(self, spec: SamplerSpec, evaluate: Callable[[Any], EventOutcome]):
        def work(rng: np.random.Generator, count: int):
            return _split(evaluate(chunk_objects(spec.kind, rng, count)), count)

        return work

    def _check_exclusions(self, name: str, excluded: int, n: int) -> None:
        if excluded == 0:
            return
        if excluded / n > self.max_excluded_fraction:
            raise SamplerDegeneracyError(excluded, n, self.max_excluded_fraction)
        logger.warning(f"{name or 'estimate'}: excluded {excluded} degenerate draws of {n}")

    @staticmethod
    def _require_trials(n: int) -> None:
        if n < MIN_TRIALS:
            raise DomainError(f"n must be at least {MIN_TRIALS}, got {n}")

    # ------------------------------------------------------------------
    # estimators
    # ------------------------------------------------------------------
    def estimate_probability(
        self,
        spec: SamplerSpec,
        event: Callable[[Any], EventOutcome],
        n: int,
        name: str = "",
    ) -> MCEstimate:
        """
        Fraction of the first n trials for which event holds.

        Args:
            spec: Sampler and seed
            event: Batch predicate; may return (hits, valid) to exclude degenerate draws
            n: Number of trials (>= 100)
            name: Label carried into the estimate

        Raises:
            SamplerDegeneracyError: More than max_excluded_fraction of the draws were excluded
        """
        self._require_trials(n)
        logger.debug(f"estimate_probability {name!r}: kind={spec.kind.value}, seed={spec.seed}, n={n}")
        work = self._sampler_work(spec, event)
        tallies = self.map_chunks(spec.seed, n, lambda rng, count: self._tally(*work(rng, count)))
        return self._probability(name, tallies, n, spec.seed)

    def probability_from_draws(
        self,
        seed: int,
        n: int,
        draw_event: Callable[[np.random.Generator, int], EventOutcome],
        name: str = "",
    ) -> MCEstimate:
        """Like estimate_probability for events that draw their own variates from the chunk stream."""
        self._require_trials(n)
        tallies = self.map_chunks(
            seed, n, lambda rng, count: self._tally(*_split(draw_event(rng, count), count))
        )
        return self._probability(name, tallies, n, seed)

    @staticmethod
    def _tally(hits: np.ndarray, valid: np.ndarray) -> Tuple[int, int]:
        return int(np.count_nonzero(hits & valid)), int(np.count_nonzero(~valid))

    def _probability(self, name: str, tallies: List[Tuple[int, int]], n: int, seed: int) -> MCEstimate:
        hits = sum(h for h, _ in tallies)
        excluded = sum(e for _, e in tallies)
        self._check_exclusions(name, excluded, n)
        used = n - excluded
        p_hat = hits / used
        low, high = wilson_interval(hits, used)
        return MCEstimate(
            name=name,
            kind="probability",
            p_hat=p_hat,
            n=n,
            stderr=math.sqrt(p_hat * (1.0 - p_hat) / used),
            ci_low=low,
            ci_high=high,
            seed=seed,
            excluded=excluded,
        )

    def estimate_mean(
        self,
        spec: SamplerSpec,
        functional: Callable[[Any], EventOutcome],
        n: int,
        name: str = "",
    ) -> MCEstimate:
        """
        Sample mean of a real functional with stderr from the sample variance.

        Raises:
            NonFiniteValueError: The functional returned NaN or inf on a valid draw
        """
        self._require_trials(n)
        logger.debug(f"estimate_mean {name!r}: kind={spec.kind.value}, seed={spec.seed}, n={n}")
        work = self._sampler_work(spec, functional)

        def moments(rng, count):
            values, valid = work(rng, count)
            kept = np.asarray(values, dtype=float)[valid]
            if not np.all(np.isfinite(kept)):
                bad = int(np.flatnonzero(~np.isfinite(kept))[0])
                raise NonFiniteValueError(f"{name or 'functional'} returned {kept[bad]} on a valid draw")
            if kept.size == 0:
                return 0, 0.0, 0.0, count
            mean = float(kept.mean())
            return kept.size, mean, float(np.sum((kept - mean) ** 2)), count - kept.size

        return self._mean(name, self.map_chunks(spec.seed, n, moments), n, spec.seed)

    def _mean(self, name: str, parts: List[Tuple[int, float, float, int]], n: int, seed: int) -> MCEstimate:
        count, mean, m2, excluded = 0, 0.0, 0.0, 0
        for part_count, part_mean, part_m2, part_excluded in parts:
            excluded += part_excluded
            if part_count == 0:
                continue
            total = count + part_count
            delta = part_mean - mean
            mean += delta * part_count / total
            m2 += part_m2 + delta * delta * count * part_count / total
            count = total
        self._check_exclusions(name, excluded, n)
        stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
        return MCEstimate(
            name=name,
            kind="mean",
            p_hat=mean,
            n=n,
            stderr=stderr,
            ci_low=mean - Z_95 * stderr,
            ci_high=mean + Z_95 * stderr,
            seed=seed,
            excluded=excluded,
        )

    def collect_values(
        self,
        spec: SamplerSpec,
        functional: Callable[[Any], EventOutcome],
        n: int,
    ) -> np.ndarray:
        """Functional values of the valid draws in trial order (any trailing shape)."""
        self._require_trials(n)
        work = self._sampler_work(spec, functional)

        def keep(rng, count):
            values, valid = work(rng, count)
            return np.asarray(values, dtype=float)[valid], int(np.count_nonzero(~valid))

        parts = self.map_chunks(spec.seed, n, keep)
        self._check_exclusions("collect", sum(e for _, e in parts), n)
        return np.concatenate([values for values, _ in parts])

    def collect_samples(
        self,
        spec: SamplerSpec,
        functional: Callable[[Any], EventOutcome],
        n: int,
    ) -> EmpiricalDistribution:
        return EmpiricalDistribution(self.collect_values(spec, functional, n))


def ks_statistic(samples: EmpiricalDistribution, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    Supremum distance between the empirical CDF of samples and cdf.

    Raises:
        DistributionError: Fewer than 1000 samples, or cdf fails a monotonicity spot check
    """
    if samples.count < MIN_KS_SAMPLES:
        raise DistributionError(f"KS statistic needs at least {MIN_KS_SAMPLES} samples, got {samples.count}")
    checkpoints = np.quantile(samples.values, np.linspace(0.0, 1.0, 101))
    checked_values = np.asarray(cdf(checkpoints), dtype=float)
    if np.any(np.diff(checked_values) < 0.0) or np.any((checked_values < 0.0) | (checked_values > 1.0)):
        raise DistributionError("reference CDF is not a monotone map into [0, 1] on the sample range")
    return float(stats.kstest(samples.values, cdf).statistic)


def ks_critical_value(n: int, alpha: float = 0.01) -> float:
    """Asymptotic KS critical value at level alpha (1.63/√n for alpha = 0.01)."""
    return float(stats.kstwobign.ppf(1.0 - alpha) / math.sqrt(n))


def chi_square_uniformity(x, y, bins: int, lo: float, hi: float) -> Tuple[float, float]:
    """Chi-square statistic and p-value of (x, y) against the uniform law on [lo, hi]²."""
    counts, _, _ = np.histogram2d(x, y, bins=bins, range=[[lo, hi], [lo, hi]])
    result = stats.chisquare(counts.ravel())
    return float(result.statistic), float(result.pvalue)


def sample_correlations(values: np.ndarray) -> np.ndarray:
    """Pairwise Pearson correlations of the columns of values."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] < 2:
        raise DistributionError("need a (n, k >= 2) sample for correlations")
    return np.corrcoef(values, rowvar=False)
