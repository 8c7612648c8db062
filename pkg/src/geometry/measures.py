"""
Measurements on triangles and tetrahedra: volumes, projections, angles and circumcenters.

All functions broadcast over leading axes, so a Tetrahedron holding (N, 3) arrays is
measured in one call. With check=True (the default) any degenerate member raises;
batch callers that already filtered with degenerate_*_mask pass check=False.
"""
from typing import Tuple

import numpy as np

from src.models.geometry import (
    EDGES,
    DihedralAngles,
    ProjectionCoeffs,
    SolidAngles,
    Tetrahedron,
    Triangle,
    as_points,
)
from src.utils.errors import CoincidentVertexError, DegenerateGeometryError

DEGENERACY_RTOL = 1e-12

# Faces as the vertex each one is opposite to; an edge's two faces are opposite its other two vertices.
_OPPOSITE = {"a": "bcd", "b": "acd", "c": "abd", "d": "abc"}


def dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", u, v)


def norm(u: np.ndarray) -> np.ndarray:
    return np.sqrt(dot(u, u))


def unwrap(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


def require_distinct(*pairs: Tuple[np.ndarray, np.ndarray]) -> None:
    for p, q in pairs:
        if np.any(np.all(p == q, axis=-1)):
            raise CoincidentVertexError("two vertices that must differ coincide")


def max_edge_length(points: Tuple[np.ndarray, ...]) -> np.ndarray:
    edges = [norm(q - p) for i, p in enumerate(points) for q in points[i + 1:]]
    return np.max(np.stack(edges, axis=-1), axis=-1)


def signed_volume(t: Tetrahedron) -> np.ndarray:
    """(b−a)·((c−a)×(d−a)) / 6; positive for a right-handed vertex order."""
    u, v, w = t.b - t.a, t.c - t.a, t.d - t.a
    return unwrap(dot(u, np.cross(v, w)) / 6.0)


def tetrahedron_volume(t: Tetrahedron) -> np.ndarray:
    return np.abs(signed_volume(t))


def triangle_area(t: Triangle) -> np.ndarray:
    return unwrap(0.5 * norm(np.cross(t.b - t.a, t.c - t.a)))


def degenerate_tetra_mask(t: Tetrahedron) -> np.ndarray:
    """|volume| <= 1e-12 · (longest edge)³."""
    scale = max_edge_length(t.vertices)
    return np.abs(signed_volume(t)) <= DEGENERACY_RTOL * scale**3


def degenerate_triangle_mask(t: Triangle) -> np.ndarray:
    """area <= 1e-12 · (longest edge)²."""
    scale = max_edge_length(t.vertices)
    return triangle_area(t) <= DEGENERACY_RTOL * scale**2


def require_tetrahedron(t: Tetrahedron) -> None:
    if np.any(degenerate_tetra_mask(t)):
        raise DegenerateGeometryError("tetrahedron has (numerically) zero volume")


def require_triangle(t: Triangle) -> None:
    if np.any(degenerate_triangle_mask(t)):
        raise DegenerateGeometryError("triangle has (numerically) zero area")


def projection_coeffs(a, b, c, d, check: bool = True) -> ProjectionCoeffs:
    """
    Coefficients of D − A against the edges B − A and C − A.

    r = (B−A)·(D−A)/‖B−A‖² and s = (C−A)·(D−A)/‖C−A‖²; dot_bd and dot_cd keep the
    numerators so callers can test signs without dividing.
    """
    a, b, c, d = (as_points(p) for p in (a, b, c, d))
    if check:
        require_distinct((a, b), (a, c))
    u, v, w = b - a, c - a, d - a
    dot_bd, dot_cd = dot(u, w), dot(v, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = dot_bd / dot(u, u)
        s = dot_cd / dot(v, v)
    return ProjectionCoeffs(r=unwrap(r), s=unwrap(s), dot_bd=unwrap(dot_bd), dot_cd=unwrap(dot_cd))


def triangle_projection_t(a, b, c, check: bool = True):
    """t = (B−A)·(C−A)/‖B−A‖²; C's foot on line AB falls between A and B iff 0 < t < 1."""
    a, b, c = (as_points(p) for p in (a, b, c))
    if check:
        require_distinct((a, b))
    u = b - a
    with np.errstate(divide="ignore", invalid="ignore"):
        return unwrap(dot(u, c - a) / dot(u, u))


def _angle_between(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.arctan2(norm(np.cross(u, v)), dot(u, v))


def triangle_angles(t: Triangle, check: bool = True) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Interior angles at a, b and c."""
    if check:
        require_triangle(t)
    alpha = _angle_between(t.b - t.a, t.c - t.a)
    beta = _angle_between(t.a - t.b, t.c - t.b)
    gamma = _angle_between(t.a - t.c, t.b - t.c)
    return unwrap(alpha), unwrap(beta), unwrap(gamma)


def outward_normals(t: Tetrahedron) -> dict:
    """Un-normalised outward normal of the face opposite each vertex, keyed by that vertex."""
    named = dict(zip("abcd", t.vertices))
    normals = {}
    for apex, face in _OPPOSITE.items():
        p, q, r = (named[name] for name in face)
        n = np.cross(q - p, r - p)
        inward = dot(n, named[apex] - p) > 0.0
        normals[apex] = np.where(inward[..., None], -n, n)
    return normals


def dihedral_angles(t: Tetrahedron, check: bool = True) -> DihedralAngles:
    """Interior dihedral angle at each of the six edges, in EDGES order."""
    if check:
        require_tetrahedron(t)
    normals = outward_normals(t)
    angles = []
    for edge in EDGES:
        first, second = (v for v in "abcd" if v not in edge)
        angles.append(np.pi - _angle_between(normals[first], normals[second]))
    return DihedralAngles(edges=np.stack(angles, axis=-1))


def pinned_dihedral_angles(a, b, c) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    α, β, γ at edges DA, DB, DC of a tetrahedron with D at the origin.

    α = arccos((A×B)·(A×C) / (‖A×B‖‖A×C‖)); β and γ cycle the roles of A, B, C.
    """
    a, b, c = (as_points(p) for p in (a, b, c))

    def at(p, q, r):
        n1, n2 = np.cross(p, q), np.cross(p, r)
        cosine = dot(n1, n2) / (norm(n1) * norm(n2))
        return unwrap(np.arccos(np.clip(cosine, -1.0, 1.0)))

    return at(a, b, c), at(b, a, c), at(c, a, b)


def spherical_triangle_angles(apex, p1, p2, p3) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Angles of the spherical triangle cut by the rays apex→p1, apex→p2, apex→p3,
    from the face angles by the spherical law of cosines. They are also the
    dihedral angles at edges apex-p1, apex-p2, apex-p3.
    """
    apex, p1, p2, p3 = (as_points(p) for p in (apex, p1, p2, p3))
    r1, r2, r3 = p1 - apex, p2 - apex, p3 - apex
    side1, side2, side3 = _angle_between(r2, r3), _angle_between(r1, r3), _angle_between(r1, r2)

    def corner(opposite, s, t):
        cosine = (np.cos(opposite) - np.cos(s) * np.cos(t)) / (np.sin(s) * np.sin(t))
        return np.arccos(np.clip(cosine, -1.0, 1.0))

    return (
        unwrap(corner(side1, side2, side3)),
        unwrap(corner(side2, side1, side3)),
        unwrap(corner(side3, side1, side2)),
    )


def spherical_excess(apex, p1, p2, p3):
    """Solid angle as angle sum minus π of the apex's spherical triangle."""
    return unwrap(sum(spherical_triangle_angles(apex, p1, p2, p3)) - np.pi)


def solid_angle(apex, p1, p2, p3, check: bool = True):
    """
    Solid angle at apex subtended by the triangle p1 p2 p3.

    ζ = |A·(B×C)| / (‖A‖‖B‖‖C‖ + (A·B)‖C‖ + (A·C)‖B‖ + (B·C)‖A‖) with A, B, C the rays;
    the value is 2 atan ζ for ζ >= 0 and 2π + 2 atan ζ for ζ < 0, which is 2·atan2(num, den).
    """
    apex, p1, p2, p3 = (as_points(p) for p in (apex, p1, p2, p3))
    A, B, C = p1 - apex, p2 - apex, p3 - apex
    la, lb, lc = norm(A), norm(B), norm(C)
    numerator = np.abs(dot(A, np.cross(B, C)))
    if check and np.any(numerator <= DEGENERACY_RTOL * la * lb * lc):
        raise DegenerateGeometryError("rays from the apex are coplanar")
    denominator = la * lb * lc + dot(A, B) * lc + dot(A, C) * lb + dot(B, C) * la
    return unwrap(2.0 * np.arctan2(numerator, denominator))


def solid_angles(t: Tetrahedron, check: bool = True) -> SolidAngles:
    if check:
        require_tetrahedron(t)
    a, b, c, d = t.vertices
    values = [
        solid_angle(a, b, c, d, check=False),
        solid_angle(b, a, c, d, check=False),
        solid_angle(c, a, b, d, check=False),
        solid_angle(d, a, b, c, check=False),
    ]
    return SolidAngles(vertices=np.stack(values, axis=-1))


def solid_angle_sum(t: Tetrahedron, check: bool = True):
    """σ, the sum of the four vertex solid angles."""
    return unwrap(solid_angles(t, check).total)


def circumcenter_triangle(t: Triangle, check: bool = True) -> np.ndarray:
    """a + (‖u‖²(v×w) + ‖v‖²(w×u)) / (2‖w‖²) with u = b−a, v = c−a, w = u×v."""
    if check:
        require_triangle(t)
    u, v = t.b - t.a, t.c - t.a
    w = np.cross(u, v)
    offset = dot(u, u)[..., None] * np.cross(v, w) + dot(v, v)[..., None] * np.cross(w, u)
    return t.a + offset / (2.0 * dot(w, w))[..., None]


def circumcenter_tetra(t: Tetrahedron, check: bool = True) -> np.ndarray:
    if check:
        require_tetrahedron(t)
    u, v, w = t.b - t.a, t.c - t.a, t.d - t.a
    triple = dot(u, np.cross(v, w))
    offset = (
        dot(u, u)[..., None] * np.cross(v, w)
        + dot(v, v)[..., None] * np.cross(w, u)
        + dot(w, w)[..., None] * np.cross(u, v)
    )
    return t.a + offset / (2.0 * triple)[..., None]


def tetra_barycentric(t: Tetrahedron, p) -> np.ndarray:
    """Barycentric coordinates of p, last axis 4 (a, b, c, d)."""
    p = as_points(p)
    a, b, c, d = t.vertices
    total = 6.0 * np.asarray(signed_volume(t))
    parts = [
        Tetrahedron(p, b, c, d),
        Tetrahedron(a, p, c, d),
        Tetrahedron(a, b, p, d),
        Tetrahedron(a, b, c, p),
    ]
    return np.stack([6.0 * np.asarray(signed_volume(part)) / total for part in parts], axis=-1)


def triangle_barycentric(t: Triangle, p) -> np.ndarray:
    """
    Barycentric coordinates of p (or of its orthogonal projection onto the plane of t),
    last axis 3.
    """
    p = as_points(p)
    a, b, c = t.vertices
    n = np.cross(b - a, c - a)
    nn = dot(n, n)
    coords = [
        dot(n, np.cross(b - p, c - p)) / nn,
        dot(n, np.cross(c - p, a - p)) / nn,
        dot(n, np.cross(a - p, b - p)) / nn,
    ]
    return np.stack(coords, axis=-1)


def faces(t: Tetrahedron) -> Tuple[Triangle, Triangle, Triangle, Triangle]:
    """Faces opposite a, b, c, d in that order."""
    a, b, c, d = t.vertices
    return Triangle(b, c, d), Triangle(a, c, d), Triangle(a, b, d), Triangle(a, b, c)
