"""
Named Monte Carlo events: which sampler to draw from, the batch predicate or functional,
and the known target value when one exists.
"""
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.geometry import measures, predicates
from src.models.geometry import Tetrahedron
from src.models.sampling import SamplerKind, TETRA_KINDS
from src.utils.errors import UnknownQuantityError

REGULAR_TETRA = Tetrahedron.from_points((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
CORNER_TETRA = Tetrahedron.from_points((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
SHAPES = {"regular": REGULAR_TETRA, "corner": CORNER_TETRA}

GAMMA_CONE = 0.6837762984
REFLECTED_CONE = 0.6810669069
PINNED_QUADRANT = 0.8343764256
# Gaussian: (2/3)√(2/π), from E|det| of a 3×3 standard Gaussian matrix times √4/3!.
# Cube: 3977/216000 − π²/2160 (a leading 3977/21600 is off by a factor of ten).
MEAN_VOLUMES = {
    SamplerKind.GAUSSIAN_TETRA: 2.0 / 3.0 * math.sqrt(2.0 / math.pi),
    SamplerKind.UNIFORM_BALL_TETRA: 12.0 * math.pi / 715.0,
    SamplerKind.UNIFORM_CUBE_TETRA: 3977.0 / 216000.0 - math.pi**2 / 2160.0,
}


@dataclass(frozen=True)
class EventDefinition:
    """
    A named estimate.

    Attributes:
        name: Registry name (as given on the command line)
        sampler: Which stream to draw from
        evaluate: Batch predicate (probability) or functional (mean); may return (values, valid)
        kind: "probability" or "mean"
        target: Known exact value, if any
    """

    name: str
    sampler: SamplerKind
    evaluate: Callable[[Any], Any]
    kind: str = "probability"
    target: Optional[float] = None


def _distinct(*points: np.ndarray) -> np.ndarray:
    valid = np.ones(points[0].shape[:-1], dtype=bool)
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            valid &= np.any(p != q, axis=-1)
    return valid


def _cone(field: str):
    def evaluate(t: Tetrahedron):
        events = predicates.cone_events(t.a, t.b, t.c, t.d, check=False)
        return getattr(events, field), _distinct(*t.vertices)

    return evaluate


def _tetra_predicate(predicate):
    def evaluate(t: Tetrahedron):
        return predicate(t, check=False), ~measures.degenerate_tetra_mask(t)

    return evaluate


def _acute_triangle(t):
    return predicates.is_acute_triangle(t, check=False), ~measures.degenerate_triangle_mask(t)


def _projection_between(t):
    # pinned triangles keep C at the origin, so C is the projected vertex in both cases
    foot = measures.triangle_projection_t(t.a, t.b, t.c, check=False)
    return (foot > 0.0) & (foot < 1.0), _distinct(t.a, t.b)


def _volume(t: Tetrahedron):
    return measures.tetrahedron_volume(t)


def _sigma_fraction(t: Tetrahedron):
    valid = ~measures.degenerate_tetra_mask(t)
    return measures.solid_angle_sum(t, check=False) / (2.0 * math.pi), valid


def _shadow(shape: Tetrahedron):
    def evaluate(normals: np.ndarray):
        hits = predicates.shadow_is_triangle(shape, normals, check=False)
        return hits, ~predicates.shadow_degenerate_mask(shape, normals)

    return evaluate


def shadow_target(shape: Tetrahedron) -> float:
    """σ/(2π): the chance that a uniformly oriented shadow of the tetrahedron is a triangle."""
    return measures.solid_angle_sum(shape) / (2.0 * math.pi)


EVENTS: Dict[str, EventDefinition] = {
    event.name: event
    for event in (
        EventDefinition("gamma-cone", SamplerKind.GAUSSIAN_TETRA, _cone("in_gamma"), target=GAMMA_CONE),
        EventDefinition(
            "reflected-cone", SamplerKind.GAUSSIAN_TETRA, _cone("in_reflected"), target=REFLECTED_CONE
        ),
        EventDefinition("parallelogram", SamplerKind.GAUSSIAN_TETRA, _cone("in_parallelogram")),
        EventDefinition(
            "pinned-quadrant", SamplerKind.PINNED_TETRA, _cone("in_gamma"), target=PINNED_QUADRANT
        ),
        EventDefinition(
            "acute-tetra", SamplerKind.GAUSSIAN_TETRA, _tetra_predicate(predicates.is_acute_tetrahedron)
        ),
        EventDefinition(
            "pinned-acute-tetra", SamplerKind.PINNED_TETRA, _tetra_predicate(predicates.is_acute_tetrahedron)
        ),
        EventDefinition("acute-triangle", SamplerKind.GAUSSIAN_TRIANGLE, _acute_triangle, target=0.25),
        EventDefinition(
            "pinned-acute-triangle",
            SamplerKind.PINNED_TRIANGLE,
            _acute_triangle,
            target=-0.5 + 1.0 / math.sqrt(2.0),
        ),
        EventDefinition("projection-between", SamplerKind.GAUSSIAN_TRIANGLE, _projection_between, target=0.5),
        EventDefinition(
            "pinned-projection-between",
            SamplerKind.PINNED_TRIANGLE,
            _projection_between,
            target=1.0 / math.sqrt(2.0),
        ),
        EventDefinition(
            "three-well-centered", SamplerKind.GAUSSIAN_TETRA, _tetra_predicate(predicates.is_3_well_centered)
        ),
        EventDefinition(
            "two-well-centered", SamplerKind.GAUSSIAN_TETRA, _tetra_predicate(predicates.is_2_well_centered)
        ),
    )
}

# Reported as samples with goodness-of-fit numbers rather than a single estimate.
STUDIES = ("solid-angle-samples", "dihedral-samples")


def _sampler_argument(name: str, argument: str) -> SamplerKind:
    try:
        kind = SamplerKind(argument)
    except ValueError:
        raise UnknownQuantityError(f"{name}: unknown sampler {argument!r}") from None
    if kind not in TETRA_KINDS:
        raise UnknownQuantityError(f"{name}: sampler {argument!r} does not draw tetrahedra")
    return kind


def resolve_event(name: str) -> EventDefinition:
    """
    Look up a named event, including the parametrised forms
    shadow-triangle:<regular|corner>, volume-mean:<sampler> and sigma-mean:<sampler>.

    Raises:
        UnknownQuantityError: The name (or its argument) is not recognised
    """
    if name in EVENTS:
        return EVENTS[name]
    head, _, argument = name.partition(":")
    if head == "shadow-triangle" and argument in SHAPES:
        shape = SHAPES[argument]
        return EventDefinition(
            name, SamplerKind.UNIFORM_PLANE_NORMAL, _shadow(shape), target=shadow_target(shape)
        )
    if head == "volume-mean" and argument:
        kind = _sampler_argument(head, argument)
        return EventDefinition(name, kind, _volume, kind="mean", target=MEAN_VOLUMES.get(kind))
    if head == "sigma-mean" and argument:
        kind = _sampler_argument(head, argument)
        return EventDefinition(name, kind, _sigma_fraction, kind="mean")
    raise UnknownQuantityError(f"unknown event {name!r}")
