"""
Tests for the geometry measures and predicates.
"""
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from src.geometry import measures, predicates
from src.models.geometry import Tetrahedron, Triangle
from src.utils.errors import CoincidentVertexError, DegenerateGeometryError

REGULAR_DIHEDRAL = math.acos(1.0 / 3.0)
REGULAR_SOLID_ANGLE = 0.5512855984


def rotation_from_quaternion(w: float, x: float, y: float, z: float) -> np.ndarray:
    q = np.array([w, x, y, z]) / math.sqrt(w * w + x * x + y * y + z * z)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


unit = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
offset = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


class TestRegularAndCorner:
    def test_regular_dihedral_angles(self, regular_tetra):
        edges = measures.dihedral_angles(regular_tetra).edges
        assert edges.shape == (6,)
        assert np.max(np.abs(edges - REGULAR_DIHEDRAL)) < 1e-12

    def test_regular_solid_angles(self, regular_tetra):
        angles = measures.solid_angles(regular_tetra).vertices
        assert np.allclose(angles, REGULAR_SOLID_ANGLE, atol=1e-9)
        assert measures.solid_angle_sum(regular_tetra) / (2 * math.pi) == pytest.approx(0.3509593121, abs=1e-9)

    def test_corner_solid_angle_at_origin(self, corner_tetra):
        t = corner_tetra
        assert measures.solid_angle(t.a, t.b, t.c, t.d) == pytest.approx(math.pi / 2, abs=1e-14)

    def test_corner_dihedral_angles(self, corner_tetra):
        angles = measures.dihedral_angles(corner_tetra)
        for edge in ("ab", "ac", "ad"):
            assert angles.at(edge) == pytest.approx(math.pi / 2, abs=1e-14)
        for edge in ("bc", "bd", "cd"):
            assert angles.at(edge) == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-14)

    def test_pinned_dihedral_angles_of_corner(self):
        alpha, beta, gamma = measures.pinned_dihedral_angles((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert (alpha, beta, gamma) == pytest.approx((math.pi / 2,) * 3, abs=1e-14)

    def test_volumes(self, corner_tetra, regular_tetra):
        assert measures.tetrahedron_volume(corner_tetra) == pytest.approx(1 / 6)
        assert measures.tetrahedron_volume(regular_tetra) == pytest.approx(8 / 3)


class TestMeasures:
    def test_pinned_formula_matches_general_dihedrals(self, gaussian_points):
        a, b, c, _ = gaussian_points
        origin = np.zeros_like(a)
        t = Tetrahedron(a, b, c, origin)
        general = measures.dihedral_angles(t, check=False)
        alpha, beta, gamma = measures.pinned_dihedral_angles(a, b, c)
        assert np.allclose(alpha, general.alpha, atol=1e-9)
        assert np.allclose(beta, general.beta, atol=1e-9)
        assert np.allclose(gamma, general.gamma, atol=1e-9)

    def test_solid_angle_matches_spherical_excess(self, skew_tetra):
        t = skew_tetra
        for apex, others in zip(t.vertices, ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))):
            p1, p2, p3 = (t.vertices[i] for i in others)
            assert measures.solid_angle(apex, p1, p2, p3) == pytest.approx(
                measures.spherical_excess(apex, p1, p2, p3), abs=1e-9
            )

    def test_solid_angle_obtuse_branch(self):
        # nearly coplanar rays cut off almost a hemisphere; the atan2 form keeps the value above π
        apex = np.zeros(3)
        value = measures.solid_angle(apex, (1, 0, -0.1), (-0.5, 0.87, -0.1), (-0.5, -0.87, -0.1))
        assert value > math.pi

    def test_projection_coeffs(self):
        coeffs = measures.projection_coeffs((0, 0, 0), (2, 0, 0), (0, 4, 0), (1, 1, 5))
        assert coeffs.r == pytest.approx(0.5)
        assert coeffs.s == pytest.approx(0.25)
        assert coeffs.dot_bd == pytest.approx(2.0)
        assert coeffs.dot_cd == pytest.approx(4.0)

    def test_triangle_angles_sum_to_pi(self, gaussian_points):
        a, b, c, _ = gaussian_points
        total = sum(measures.triangle_angles(Triangle(a, b, c), check=False))
        assert np.allclose(total, math.pi, atol=1e-12)

    def test_batches_broadcast(self, gaussian_points):
        t = Tetrahedron(*gaussian_points)
        assert measures.solid_angles(t, check=False).vertices.shape == (10_000, 4)
        assert measures.dihedral_angles(t, check=False).edges.shape == (10_000, 6)
        assert np.shape(measures.signed_volume(t)) == (10_000,)

    @settings(max_examples=50, deadline=None)
    @given(unit, unit, unit, unit, offset, offset, offset, st.floats(min_value=0.1, max_value=10.0))
    def test_rigid_motion_invariance(self, w, x, y, z, dx, dy, dz, scale):
        assume(w * w + x * x + y * y + z * z > 0.01)
        base = Tetrahedron.from_points((0.0, 0.0, 0.0), (1.2, 0.1, -0.3), (0.2, 0.9, 0.4), (-0.1, 0.3, 1.1))
        moved = base.transformed(rotation_from_quaternion(w, x, y, z), np.array([dx, dy, dz]), scale)
        assert np.allclose(measures.dihedral_angles(moved).edges, measures.dihedral_angles(base).edges, atol=1e-9)
        assert np.allclose(measures.solid_angles(moved).vertices, measures.solid_angles(base).vertices, atol=1e-9)
        assert measures.tetrahedron_volume(moved) == pytest.approx(
            scale**3 * measures.tetrahedron_volume(base), rel=1e-9
        )


class TestDegeneracy:
    def test_flat_tetrahedron_is_rejected(self):
        flat = Tetrahedron.from_points((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
        assert measures.degenerate_tetra_mask(flat)
        with pytest.raises(DegenerateGeometryError):
            measures.dihedral_angles(flat)
        with pytest.raises(DegenerateGeometryError):
            measures.solid_angle((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))

    def test_coincident_vertices(self):
        with pytest.raises(CoincidentVertexError):
            predicates.cone_events((0, 0, 0), (0, 0, 0), (0, 1, 0), (1, 1, 1))

    def test_collinear_triangle(self):
        line = Triangle.from_points((0, 0, 0), (1, 0, 0), (2, 0, 0))
        with pytest.raises(DegenerateGeometryError):
            predicates.is_acute_triangle(line)


class TestPredicates:
    def test_cone_events_inside_parallelogram(self):
        events = predicates.cone_events((0, 0, 0), (1, 0, 0), (0, 1, 0), (0.5, 0.5, 1.0))
        assert events.in_gamma and events.in_reflected and events.in_parallelogram

    def test_cone_events_outside_reflected_cone(self):
        events = predicates.cone_events((0, 0, 0), (1, 0, 0), (0, 1, 0), (2.0, 0.5, 0.0))
        assert events.in_gamma
        assert not events.in_reflected
        assert not events.in_parallelogram

    def test_parallelogram_matches_projection_coefficients(self, gaussian_points):
        a, b, c, d = gaussian_points
        events = predicates.cone_events(a, b, c, d, check=False)
        coeffs = measures.projection_coeffs(a, b, c, d, check=False)
        inside = (coeffs.r > 0) & (coeffs.r < 1) & (coeffs.s > 0) & (coeffs.s < 1)
        assert np.array_equal(events.in_parallelogram, inside)
        assert np.array_equal(events.in_parallelogram, events.in_gamma & events.in_reflected)

    def test_f_ratio_forms_match_dot_products(self, gaussian_points):
        forms = predicates.f_ratio_forms(*gaussian_points)
        dots = predicates.f_ratio_dot_products(*gaussian_points)
        assert np.array_equal(forms > 1 / 3, dots > 0)

    def test_triangle_f_ratio(self, gaussian_points):
        a, b, c, _ = gaussian_points
        ratio = predicates.triangle_f_ratio(a, b, c)
        assert np.array_equal(ratio > 1 / 3, np.einsum("ij,ij->i", b - a, c - a) > 0)

    def test_pinned_triangle_f_ratio(self, gaussian_points):
        a, b, _, _ = gaussian_points
        ratio = predicates.pinned_triangle_f_ratio(a, b)
        assert np.array_equal(ratio > predicates.PINNED_THRESHOLD, np.einsum("ij,ij->i", b - a, -a) > 0)

    def test_acute_triangles(self):
        equilateral = Triangle.from_points((0, 0, 0), (1, 0, 0), (0.5, math.sqrt(3) / 2, 0))
        right = Triangle.from_points((0, 0, 0), (1, 0, 0), (0, 1, 0))
        obtuse = Triangle.from_points((0, 0, 0), (4, 0, 0), (1, 0.5, 0))
        assert predicates.is_acute_triangle(equilateral)
        assert not predicates.is_acute_triangle(right)
        assert not predicates.is_acute_triangle(obtuse)

    def test_regular_tetrahedron_predicates(self, regular_tetra):
        assert predicates.is_acute_tetrahedron(regular_tetra)
        assert predicates.projections_inside_faces(regular_tetra)
        assert predicates.is_3_well_centered(regular_tetra)
        assert predicates.is_2_well_centered(regular_tetra)

    def test_corner_tetrahedron_predicates(self, corner_tetra):
        # right angles at the origin: every strict test fails
        assert not predicates.is_acute_tetrahedron(corner_tetra)
        assert not predicates.is_3_well_centered(corner_tetra)
        assert not predicates.is_2_well_centered(corner_tetra)

    def test_acute_iff_projections_inside(self, gaussian_points):
        t = Tetrahedron(*gaussian_points)
        valid = ~measures.degenerate_tetra_mask(t)
        acute = predicates.is_acute_tetrahedron(t, check=False)
        inside = predicates.projections_inside_faces(t, check=False)
        assert np.array_equal(acute[valid], inside[valid])

    def test_regular_shadow(self, regular_tetra):
        assert not predicates.shadow_is_triangle(regular_tetra, (0.0, 0.0, 1.0))
        assert predicates.shadow_is_triangle(regular_tetra, (1.0, 1.0, 1.0))

    def test_corner_shadow_along_an_axis_is_degenerate(self, corner_tetra):
        # the origin and (0, 0, 1) land on the same point
        assert predicates.shadow_degenerate_mask(corner_tetra, (0.0, 0.0, 1.0))
        with pytest.raises(DegenerateGeometryError):
            predicates.shadow_is_triangle(corner_tetra, (0.0, 0.0, 1.0))

    def test_acute_faces_iff_2_well_centered(self, gaussian_points):
        t = Tetrahedron(*gaussian_points)
        valid = ~measures.degenerate_tetra_mask(t)
        all_faces_acute = np.ones(len(t), dtype=bool)
        for face in measures.faces(t):
            all_faces_acute &= predicates.is_acute_triangle(face, check=False)
        well_centered = predicates.is_2_well_centered(t, check=False)
        assert np.array_equal(all_faces_acute[valid], well_centered[valid])

    def test_acute_triangle_iff_contains_circumcenter(self, gaussian_points):
        a, b, c, _ = gaussian_points
        t = Triangle(a, b, c)
        valid = ~measures.degenerate_triangle_mask(t)
        acute = predicates.is_acute_triangle(t, check=False)
        contains = predicates.triangle_contains_circumcenter(t, check=False)
        assert np.array_equal(acute[valid], contains[valid])
        assert 0.2 < acute.mean() < 0.3


def _same_side(p0, p1, p2, first, second):
    normal = np.cross(p1 - p0, p2 - p0)
    return np.einsum("...i,...i->...", normal, first - p0) * np.einsum("...i,...i->...", normal, second - p0) > 0


class TestCircumcenters:
    def test_right_triangle(self):
        t = Triangle.from_points((0, 0, 0), (2, 0, 0), (0, 2, 0))
        assert np.allclose(measures.circumcenter_triangle(t), [1.0, 1.0, 0.0], atol=1e-15)

    def test_regular_tetrahedron_centroid(self, regular_tetra):
        centroid = np.mean(regular_tetra.vertices, axis=0)
        assert np.allclose(measures.circumcenter_tetra(regular_tetra), centroid, atol=1e-14)

    def test_corner_tetrahedron(self, corner_tetra):
        assert np.allclose(measures.circumcenter_tetra(corner_tetra), [0.5, 0.5, 0.5], atol=1e-15)

    def test_triangle_circumcenter_is_equidistant_and_coplanar(self, gaussian_points):
        a, b, c, _ = gaussian_points
        t = Triangle(a, b, c)
        keep = measures.triangle_area(t) > 0.1
        center = measures.circumcenter_triangle(t, check=False)[keep]
        a, b, c = a[keep], b[keep], c[keep]
        radius = np.linalg.norm(center - a, axis=-1)
        assert np.allclose(np.linalg.norm(center - b, axis=-1), radius, rtol=1e-9, atol=0)
        assert np.allclose(np.linalg.norm(center - c, axis=-1), radius, rtol=1e-9, atol=0)
        normal = np.cross(b - a, c - a)
        off_plane = np.einsum("ij,ij->i", normal, center - a) / np.linalg.norm(normal, axis=-1)
        assert np.all(np.abs(off_plane) < 1e-9 * radius)

    def test_tetra_circumcenter_is_equidistant(self, gaussian_points):
        t = Tetrahedron(*gaussian_points)
        keep = measures.tetrahedron_volume(t) > 0.1
        center = measures.circumcenter_tetra(t, check=False)[keep]
        radius = np.linalg.norm(center - t.a[keep], axis=-1)
        for vertex in (t.b, t.c, t.d):
            assert np.allclose(np.linalg.norm(center - vertex[keep], axis=-1), radius, rtol=1e-9, atol=0)

    def test_3_well_centered_matches_half_space_containment(self, gaussian_points):
        t = Tetrahedron(*gaussian_points)
        keep = measures.tetrahedron_volume(t) > 0.1
        center = measures.circumcenter_tetra(t, check=False)
        inside = np.ones(len(t), dtype=bool)
        vertices = t.vertices
        for i in range(4):
            p0, p1, p2 = (vertices[j] for j in range(4) if j != i)
            inside &= _same_side(p0, p1, p2, center, vertices[i])
        decided = predicates.is_3_well_centered(t, check=False)
        assert np.array_equal(decided[keep], inside[keep])
        assert 0 < decided[keep].sum() < keep.sum()

    def test_flat_inputs_are_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            measures.circumcenter_triangle(Triangle.from_points((0, 0, 0), (1, 0, 0), (2, 0, 0)))
        with pytest.raises(DegenerateGeometryError):
            measures.circumcenter_tetra(Tetrahedron.from_points((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)))


class TestTriangleProjection:
    def test_midpoint_foot(self):
        assert measures.triangle_projection_t((0, 0, 0), (2, 0, 0), (1, 5, 0)) == pytest.approx(0.5)

    def test_apex_at_a(self):
        assert measures.triangle_projection_t((0, 0, 0), (2, 0, 0), (0, 0, 0)) == 0.0

    def test_foot_beyond_b(self):
        t = measures.triangle_projection_t((0, 0, 0), (1, 0, 0), (3, 1, 0))
        assert t == pytest.approx(3.0)
        assert not 0 < t < 1

    def test_coincident_base(self):
        with pytest.raises(CoincidentVertexError):
            measures.triangle_projection_t((1, 1, 1), (1, 1, 1), (0, 0, 0))
