"""
Validation suite: every acceptance criterion as a named check that returns report entries
with a pass flag. Runs at "default" scale or a "quick" one with fewer trials and a wider
Monte Carlo band.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.geometry import measures, predicates
from src.models.analytic import QuantityName
from src.models.config import Command, Report, ReportEntry, RunConfig
from src.models.densities import DensityCase
from src.models.quadrature import QuadratureSpec
from src.models.sampling import SamplerKind, SamplerSpec
from src.services import densities
from src.services.analytic import constant
from src.services.events import REGULAR_TETRA, shadow_target
from src.services.reporting import (
    KNOWN_VALUES,
    ReportBuilder,
    dihedral_study,
    quantity_entry,
    render,
    run_event,
    solid_angle_study,
)
from src.services.sampling import MonteCarloService, chunk_objects, draw_batch
from src.utils.errors import UnknownQuantityError
from src.utils.logger import get_logger

logger = get_logger(__name__)

CONSTANT_TOL = 1e-8
IDENTITY_TOL = 1e-13
REGULAR_DIHEDRAL = math.acos(1.0 / 3.0)
REGULAR_SOLID_ANGLE = 0.5512855984
REGULAR_SIGMA_FRACTION = 0.3509593121
CHARFUN_POINTS = ((0.0, 0.0), (1.0, 1.0), (0.5, -0.5), (-1.0, 0.25), (2.0, -1.5))
CHARFUN_GRID = np.arange(-5.0, 5.0 + 0.25, 0.5)
MILLER_SPEC = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-8)
REPRODUCIBILITY_THREADS = (1, 2, 8)


@dataclass(frozen=True)
class ValidationScale:
    """Trial counts per criterion and the Monte Carlo acceptance band in stderr units."""

    mc_trials: int
    shadow_trials: int
    charfun_trials: int
    predicate_trials: int
    implication_trials: int
    distribution_trials: int
    reproducibility_trials: int
    k: float
    # the Miles triple integral (tplquad) takes minutes
    miles_normalization: bool = True


SCALES: Dict[str, ValidationScale] = {
    "default": ValidationScale(
        mc_trials=10_000_000,
        shadow_trials=1_000_000,
        charfun_trials=1_000_000,
        predicate_trials=100_000,
        implication_trials=1_000_000,
        distribution_trials=1_000_000,
        reproducibility_trials=1_000_000,
        k=4.0,
    ),
    "quick": ValidationScale(
        mc_trials=100_000,
        shadow_trials=100_000,
        charfun_trials=100_000,
        predicate_trials=100_000,
        implication_trials=100_000,
        distribution_trials=100_000,
        reproducibility_trials=100_000,
        k=5.0,
        miles_normalization=False,
    ),
}


def _check(name: str, value: float, passed: bool, method: str, n_or_evals: int = 0, **extra) -> ReportEntry:
    return ReportEntry(name=name, value=value, method=method, n_or_evals=n_or_evals, passed=bool(passed), **extra)


class ValidationSuite:
    """Runs the named criteria in a fixed order and collects their entries into one report."""

    def __init__(
        self,
        scale: str = "default",
        seed: int = 1,
        service: Optional[MonteCarloService] = None,
    ):
        if scale not in SCALES:
            raise UnknownQuantityError(f"unknown validation scale {scale!r}")
        logger.info(f"Initializing validation suite (scale={scale}, seed={seed})")
        self.scale_name = scale
        self.scale = SCALES[scale]
        self.seed = seed
        self.service = service or MonteCarloService()
        self.criteria: Dict[str, Callable[[], List[ReportEntry]]] = {
            "reflected-cone": self.reflected_cone,
            "gamma-cone": self.gamma_cone,
            "pinned-quadrant": self.pinned_quadrant,
            "mc-vs-analytic": self.mc_vs_analytic,
            "mean-volumes": self.mean_volumes,
            "regular-tetrahedron": self.regular_tetrahedron,
            "charfun-identity": self.charfun_identity,
            "predicate-equivalences": self.predicate_equivalences,
            "implications": self.implications,
            "distributions": self.distributions,
            "normalizations": self.normalizations,
            "reproducibility": self.reproducibility,
        }

    def run(self, config: RunConfig, only: Sequence[str] = ()) -> Report:
        """
        Run the selected criteria (all when only is empty).

        Raises:
            UnknownQuantityError: a name in only is not a criterion
        """
        unknown = [name for name in only if name not in self.criteria]
        if unknown:
            raise UnknownQuantityError(
                f"unknown criteria {', '.join(unknown)}; expected some of {', '.join(self.criteria)}"
            )
        selected = [name for name in self.criteria if not only or name in only]
        results: List[ReportEntry] = []
        for name in selected:
            logger.info(f"🔍 Criterion {name}")
            entries = self.criteria[name]()
            failed = [entry.name for entry in entries if entry.passed is False]
            if failed:
                logger.warning(f"❌ {name}: failed {', '.join(failed)}")
            else:
                logger.info(f"✅ {name} passed")
            results.extend(entries)
        return Report(command=Command.VALIDATE.value, config=config.report_fields(), results=results)

    @staticmethod
    def passed(report: Report) -> bool:
        return all(entry.passed is not False for entry in report.results)

    # ------------------------------------------------------------------
    # 1-3: analytic constants
    # ------------------------------------------------------------------
    @staticmethod
    def _constant(name: QuantityName) -> List[ReportEntry]:
        return [quantity_entry(constant(name), KNOWN_VALUES[name], CONSTANT_TOL)]

    def reflected_cone(self) -> List[ReportEntry]:
        return self._constant(QuantityName.REFLECTED_CONE)

    def gamma_cone(self) -> List[ReportEntry]:
        entries = self._constant(QuantityName.GAMMA_CONE)
        gap = constant(QuantityName.GAMMA_CONE).value - constant(QuantityName.REFLECTED_CONE).value
        expected = KNOWN_VALUES[QuantityName.CONE_GAP]
        entries.append(
            _check(
                QuantityName.CONE_GAP.value,
                gap,
                gap > 0.0 and abs(gap - expected) < 2.0 * CONSTANT_TOL,
                "quadrature",
                target=expected,
            )
        )
        return entries

    def pinned_quadrant(self) -> List[ReportEntry]:
        return self._constant(QuantityName.PINNED_QUADRANT)

    # ------------------------------------------------------------------
    # 4-5: Monte Carlo against exact values
    # ------------------------------------------------------------------
    def _estimate(self, name: str, n: int) -> ReportEntry:
        return run_event(self.service, name, n, self.seed, self.scale.k)

    def mc_vs_analytic(self) -> List[ReportEntry]:
        names = (
            "gamma-cone",
            "reflected-cone",
            "pinned-quadrant",
            "acute-triangle",
            "pinned-acute-triangle",
            "projection-between",
            "pinned-projection-between",
        )
        return [self._estimate(name, self.scale.mc_trials) for name in names]

    def mean_volumes(self) -> List[ReportEntry]:
        kinds = (SamplerKind.GAUSSIAN_TETRA, SamplerKind.UNIFORM_BALL_TETRA, SamplerKind.UNIFORM_CUBE_TETRA)
        return [self._estimate(f"volume-mean:{kind.value}", self.scale.mc_trials) for kind in kinds]

    # ------------------------------------------------------------------
    # 6: regular tetrahedron
    # ------------------------------------------------------------------
    def regular_tetrahedron(self) -> List[ReportEntry]:
        dihedrals = measures.dihedral_angles(REGULAR_TETRA).edges
        worst = float(np.max(np.abs(dihedrals - REGULAR_DIHEDRAL)))
        t = REGULAR_TETRA
        vertex = measures.solid_angle(t.a, t.b, t.c, t.d)
        fraction = shadow_target(t)
        return [
            _check("regular-dihedral-max-error", worst, worst < 1e-12, "closed-form", target=0.0),
            _check(
                "regular-vertex-solid-angle",
                vertex,
                abs(vertex - REGULAR_SOLID_ANGLE) < 1e-9,
                "closed-form",
                target=REGULAR_SOLID_ANGLE,
            ),
            _check(
                "regular-sigma-over-2pi",
                fraction,
                abs(fraction - REGULAR_SIGMA_FRACTION) < 1e-9,
                "closed-form",
                target=REGULAR_SIGMA_FRACTION,
            ),
            self._estimate("shadow-triangle:regular", self.scale.shadow_trials),
        ]

    # ------------------------------------------------------------------
    # 7: characteristic functions
    # ------------------------------------------------------------------
    def charfun_identity(self) -> List[ReportEntry]:
        n = self.scale.charfun_trials
        bound = 4.0 / math.sqrt(n)
        entries = []
        for case in DensityCase:
            deviation = densities.charfun_identity_check(case, CHARFUN_GRID, CHARFUN_GRID)
            entries.append(
                _check(
                    f"charfun-identity:{case.value}",
                    deviation,
                    deviation < IDENTITY_TOL,
                    "closed-form",
                    CHARFUN_GRID.size**2,
                    uncertainty=0.0,
                )
            )
            modulus = densities.min_radicand_modulus(case, CHARFUN_GRID, CHARFUN_GRID)
            entries.append(
                _check(f"min-radicand-modulus:{case.value}", modulus, modulus > 0.5, "closed-form", CHARFUN_GRID.size**2)
            )
            for u, v in CHARFUN_POINTS:
                deviation = densities.charfun_mc_check(case, u, v, n, self.seed, self.service)
                entries.append(
                    _check(
                        f"charfun-mc:{case.value}:({u},{v})",
                        deviation,
                        deviation < bound,
                        "monte-carlo",
                        n,
                        uncertainty=1.0 / math.sqrt(n),
                        seed=self.seed,
                    )
                )
        return entries

    # ------------------------------------------------------------------
    # 8-9: predicates
    # ------------------------------------------------------------------
    def predicate_equivalences(self) -> List[ReportEntry]:
        n = self.scale.predicate_trials
        t = draw_batch(SamplerSpec(kind=SamplerKind.GAUSSIAN_TETRA, seed=self.seed), 0, n)
        a, b, c, d = t.vertices
        forms = predicates.f_ratio_forms(a, b, c, d, check=False)
        dots = predicates.f_ratio_dot_products(a, b, c, d)
        f_ratio = int(np.count_nonzero((forms > 1.0 / 3.0) != (dots > 0.0)))

        events = predicates.cone_events(a, b, c, d, check=False)
        coeffs = measures.projection_coeffs(a, b, c, d, check=False)
        inside = (coeffs.r > 0.0) & (coeffs.r < 1.0) & (coeffs.s > 0.0) & (coeffs.s < 1.0)
        parallelogram = int(
            np.count_nonzero(events.in_parallelogram != (events.in_gamma & events.in_reflected))
            + np.count_nonzero(events.in_parallelogram != inside)
        )

        valid = ~measures.degenerate_tetra_mask(t)
        acute = np.asarray(predicates.is_acute_tetrahedron(t, check=False))
        projected = np.asarray(predicates.projections_inside_faces(t, check=False))
        acuteness = int(np.count_nonzero((acute != projected) & valid))

        return [
            _check("f-ratio-vs-dot-products", f_ratio, f_ratio == 0, "exhaustive", n, seed=self.seed, target=0.0),
            _check("parallelogram-vs-cones", parallelogram, parallelogram == 0, "exhaustive", n, seed=self.seed, target=0.0),
            _check("acute-dihedral-vs-projection", acuteness, acuteness == 0, "exhaustive", n, seed=self.seed, target=0.0),
        ]

    def implications(self) -> List[ReportEntry]:
        n = self.scale.implication_trials

        def work(rng, count):
            t = chunk_objects(SamplerKind.GAUSSIAN_TETRA, rng, count)
            valid = ~measures.degenerate_tetra_mask(t)
            acute = np.asarray(predicates.is_acute_tetrahedron(t, check=False)) & valid
            small_angles = np.all(measures.solid_angles(t, check=False).vertices < math.pi / 2.0, axis=-1)
            two = np.asarray(predicates.is_2_well_centered(t, check=False)) & valid
            three = np.asarray(predicates.is_3_well_centered(t, check=False)) & valid
            return (
                int(np.count_nonzero(acute & ~small_angles)),
                int(np.count_nonzero(acute & ~two)),
                int(np.count_nonzero(three & ~acute)),
                int(np.count_nonzero(two & ~acute)),
                int(np.count_nonzero(acute & ~three)),
            )

        totals = np.sum(np.array(self.service.map_chunks(self.seed, n, work)), axis=0)
        solid, two_violations, three_witness, two_witness, acute_witness = (int(v) for v in totals)
        extra = {"seed": self.seed}
        return [
            _check("acute-implies-small-solid-angles", solid, solid == 0, "exhaustive", n, target=0.0, **extra),
            _check("acute-implies-2-well-centered", two_violations, two_violations == 0, "exhaustive", n, target=0.0, **extra),
            _check("witness-3-well-centered-not-acute", three_witness, three_witness > 0, "search", n, **extra),
            _check("witness-2-well-centered-not-acute", two_witness, two_witness > 0, "search", n, **extra),
            _check("witness-acute-not-3-well-centered", acute_witness, acute_witness > 0, "search", n, **extra),
        ]

    # ------------------------------------------------------------------
    # 10-11: distributions and normalizations
    # ------------------------------------------------------------------
    def distributions(self) -> List[ReportEntry]:
        entries = dihedral_study(self.service, self.scale.distribution_trials, self.seed, self.scale.k)
        if not self.scale.miles_normalization:
            logger.info(f"Skipping miles-normalization at scale {self.scale_name}")
            return entries
        miles = densities.miles_normalization()
        entries.append(
            _check(
                "miles-normalization",
                miles.value,
                abs(miles.value - 1.0) < 1e-6,
                "quadrature",
                uncertainty=miles.error_estimate,
                target=1.0,
                detail="density taken with an overall minus sign so it is nonnegative on its support",
            )
        )
        return entries

    def normalizations(self) -> List[ReportEntry]:
        entries = []
        for case in DensityCase:
            mass = densities.conv3_normalization(case)
            entries.append(self._mass(f"conv3-normalization:{case.value}", mass, 1e-8))
            mass = densities.miller_normalization(case, MILLER_SPEC)
            entries.append(self._mass(f"miller-normalization:{case.value}", mass, 1e-6))
        entries.append(self._mass("crofton-normalization", densities.crofton_normalization(), 1e-8))
        # reported only; passed stays None
        entries.extend(solid_angle_study(self.service, self.scale.distribution_trials, self.seed))
        return entries

    @staticmethod
    def _mass(name: str, mass, tol: float) -> ReportEntry:
        return _check(
            name,
            mass.value,
            mass.converged and abs(mass.value - 1.0) < tol,
            "quadrature",
            mass.evaluations,
            uncertainty=mass.error_estimate,
            target=1.0,
        )

    # ------------------------------------------------------------------
    # 12: reproducibility
    # ------------------------------------------------------------------
    def reproducibility(self) -> List[ReportEntry]:
        n = self.scale.reproducibility_trials
        config = RunConfig(command=Command.ESTIMATE, name="gamma-cone", n=n, seed=self.seed)
        outputs = [
            render(ReportBuilder(MonteCarloService(threads=threads)).estimate(config), "json")
            for threads in REPRODUCIBILITY_THREADS
        ]
        identical = all(text == outputs[0] for text in outputs[1:])
        return [
            _check(
                "reproducibility:threads-1-2-8",
                float(len(set(outputs))),
                identical,
                "byte-compare",
                n,
                seed=self.seed,
                target=1.0,
                detail=f"{len(outputs)} runs, {len(set(outputs))} distinct outputs",
            )
        ]
