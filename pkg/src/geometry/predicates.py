"""
Exact event predicates: cone events, F-ratio forms, acuteness, well-centeredness, shadow shape.

Sign tests use the raw dot products or orientations (no angle round trip), strict
inequalities throughout; ties are measure-zero under every sampler and resolve to False.
"""
import numpy as np

from src.geometry.measures import (
    circumcenter_tetra,
    circumcenter_triangle,
    dot,
    faces,
    norm,
    outward_normals,
    require_tetrahedron,
    require_distinct,
    require_triangle,
    tetra_barycentric,
    triangle_barycentric,
    unwrap,
)
from src.models.geometry import ConeEvents, Tetrahedron, Triangle, as_points
from src.utils.errors import DegenerateGeometryError, DomainError

SQRT2 = np.sqrt(2.0)
# Rotation that splits a pinned triangle's two Gaussian vertices into independent chi-squares.
PINNED_SIN = np.sqrt(2.0 + SQRT2) / 2.0
PINNED_COS = np.sqrt(2.0 - SQRT2) / 2.0
PINNED_THRESHOLD = 3.0 - 2.0 * SQRT2


def _points(*values):
    return tuple(as_points(v) for v in values)


def cone_events(a, b, c, d, check: bool = True) -> ConeEvents:
    """
    Where D̃, the projection of D onto the plane through A, B, C, falls:

        in_gamma          (B−A)·(D−A) > 0 and (C−A)·(D−A) > 0
        in_reflected      (A−B)·(D−B) > 0 and (A−C)·(D−C) > 0
        in_parallelogram  both, i.e. 0 < r < 1 and 0 < s < 1
    """
    a, b, c, d = _points(a, b, c, d)
    if check:
        require_distinct((a, b), (a, c), (a, d), (b, c), (b, d), (c, d))
    in_gamma = (dot(b - a, d - a) > 0.0) & (dot(c - a, d - a) > 0.0)
    in_reflected = (dot(a - b, d - b) > 0.0) & (dot(a - c, d - c) > 0.0)
    return ConeEvents(
        in_gamma=unwrap(in_gamma),
        in_reflected=unwrap(in_reflected),
        in_parallelogram=unwrap(in_gamma & in_reflected),
    )


def f_ratio_dot_products(a, b, c, d) -> np.ndarray:
    """(A−B)·(D−B), (B−A)·(D−A), (A−C)·(D−C), (C−A)·(D−A); last axis 4."""
    a, b, c, d = _points(a, b, c, d)
    return np.stack(
        [dot(a - b, d - b), dot(b - a, d - a), dot(a - c, d - c), dot(c - a, d - a)], axis=-1
    )


def f_ratio_forms(a, b, c, d, check: bool = True) -> np.ndarray:
    """
    The four norm-squared ratios whose excess over 1/3 matches the signs of
    f_ratio_dot_products, in the same order:

        ‖(A − 2B + D)/√6‖² / ‖(D − A)/√2‖²
        ‖(B − 2A + D)/√6‖² / ‖(D − B)/√2‖²
        ‖(A − 2C + D)/√6‖² / ‖(D − A)/√2‖²
        ‖(C − 2A + D)/√6‖² / ‖(D − C)/√2‖²
    """
    a, b, c, d = _points(a, b, c, d)
    pairs = (
        (a - 2.0 * b + d, d - a),
        (b - 2.0 * a + d, d - b),
        (a - 2.0 * c + d, d - a),
        (c - 2.0 * a + d, d - c),
    )
    numerators = np.stack([dot(p, p) / 6.0 for p, _ in pairs], axis=-1)
    denominators = np.stack([dot(q, q) / 2.0 for _, q in pairs], axis=-1)
    if check and np.any(denominators == 0.0):
        raise DegenerateGeometryError("F-ratio denominator vanishes (d coincides with a, b or c)")
    with np.errstate(divide="ignore", invalid="ignore"):
        return numerators / denominators


def triangle_f_ratio(a, b, c, check: bool = True):
    """‖−√(2/3)A + B/√6 + C/√6‖² / ‖(C − B)/√2‖²; exceeds 1/3 iff (B−A)·(C−A) > 0."""
    a, b, c = _points(a, b, c)
    numerator = b + c - 2.0 * a
    denominator = dot(c - b, c - b) / 2.0
    if check and np.any(denominator == 0.0):
        raise DegenerateGeometryError("b and c coincide")
    with np.errstate(divide="ignore", invalid="ignore"):
        return unwrap(dot(numerator, numerator) / 6.0 / denominator)


def pinned_triangle_f_ratio(a, b, check: bool = True):
    """
    ‖−sA + cB‖² / ‖cA + sB‖² with s = √(2+√2)/2, c = √(2−√2)/2 for a triangle whose third
    vertex is the origin; exceeds 3 − 2√2 iff (B−A)·(−A) > 0.
    """
    a, b = _points(a, b)
    numerator = -PINNED_SIN * a + PINNED_COS * b
    denominator = PINNED_COS * a + PINNED_SIN * b
    den = dot(denominator, denominator)
    if check and np.any(den == 0.0):
        raise DegenerateGeometryError("pinned triangle has a vertex at the origin")
    with np.errstate(divide="ignore", invalid="ignore"):
        return unwrap(dot(numerator, numerator) / den)


def is_acute_triangle(t: Triangle, check: bool = True):
    """All three angles strictly below π/2."""
    if check:
        require_triangle(t)
    a, b, c = t.vertices
    acute = (dot(b - a, c - a) > 0.0) & (dot(a - b, c - b) > 0.0) & (dot(a - c, b - c) > 0.0)
    return unwrap(acute)


def is_acute_tetrahedron(t: Tetrahedron, check: bool = True):
    """All six dihedral angles strictly below π/2, i.e. every pair of outward normals has a negative dot product."""
    if check:
        require_tetrahedron(t)
    normals = outward_normals(t)
    acute = np.ones(np.shape(t.a)[:-1], dtype=bool)
    for i, first in enumerate("abcd"):
        for second in "abcd"[i + 1:]:
            acute &= dot(normals[first], normals[second]) < 0.0
    return unwrap(acute)


def projections_inside_faces(t: Tetrahedron, check: bool = True):
    """Every vertex's orthogonal projection lies strictly inside the opposite face."""
    if check:
        require_tetrahedron(t)
    inside = np.ones(np.shape(t.a)[:-1], dtype=bool)
    for vertex, face in zip(t.vertices, faces(t)):
        inside &= np.all(triangle_barycentric(face, vertex) > 0.0, axis=-1)
    return unwrap(inside)


def is_3_well_centered(t: Tetrahedron, check: bool = True):
    """Circumcenter strictly inside (all four barycentric coordinates positive)."""
    if check:
        require_tetrahedron(t)
    center = circumcenter_tetra(t, check=False)
    return unwrap(np.all(tetra_barycentric(t, center) > 0.0, axis=-1))


def triangle_contains_circumcenter(t: Triangle, check: bool = True):
    if check:
        require_triangle(t)
    center = circumcenter_triangle(t, check=False)
    return unwrap(np.all(triangle_barycentric(t, center) > 0.0, axis=-1))


def is_2_well_centered(t: Tetrahedron, check: bool = True):
    """Every face strictly contains its own circumcenter."""
    if check:
        require_tetrahedron(t)
    result = np.ones(np.shape(t.a)[:-1], dtype=bool)
    for face in faces(t):
        result &= np.asarray(triangle_contains_circumcenter(face, check=False), dtype=bool)
    return unwrap(result)


def plane_basis(normal) -> tuple:
    """Orthonormal e1, e2 spanning the plane perpendicular to normal."""
    normal = as_points(normal)
    length = norm(normal)
    if np.any(length == 0.0):
        raise DomainError("plane normal must be nonzero")
    n_hat = normal / length[..., None]
    helper = np.eye(3)[np.argmin(np.abs(n_hat), axis=-1)]
    e1 = np.cross(n_hat, helper)
    e1 = e1 / norm(e1)[..., None]
    return e1, np.cross(n_hat, e1)


def _orientation(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])


def _shadow(t: Tetrahedron, normal):
    """(some vertex projects strictly inside the other three, three projections collinear)."""
    e1, e2 = plane_basis(normal)
    flat = [np.stack([dot(p, e1), dot(p, e2)], axis=-1) for p in t.vertices]
    shape = np.broadcast_shapes(*(p.shape[:-1] for p in flat))
    collinear = np.zeros(shape, dtype=bool)
    inside_any = np.zeros(shape, dtype=bool)
    for i in range(4):
        j, k, l = (m for m in range(4) if m != i)
        base = _orientation(flat[j], flat[k], flat[l])
        collinear |= base == 0.0
        inside = np.ones(shape, dtype=bool)
        for p, q in ((j, k), (k, l), (l, j)):
            inside &= _orientation(flat[p], flat[q], flat[i]) * base > 0.0
        inside_any |= inside
    return inside_any, collinear


def shadow_degenerate_mask(t: Tetrahedron, normal) -> np.ndarray:
    """Three of the four projected vertices are collinear (exact zero orientation)."""
    return _shadow(t, normal)[1]


def shadow_is_triangle(t: Tetrahedron, normal, check: bool = True):
    """The orthogonal shadow on the plane normal to normal is a triangle, not a quadrilateral."""
    inside, collinear = _shadow(t, normal)
    if check and np.any(collinear):
        raise DegenerateGeometryError("three projected vertices are collinear")
    return unwrap(inside & ~collinear)
