# geometry package
from src.geometry.measures import (
    circumcenter_tetra,
    circumcenter_triangle,
    degenerate_tetra_mask,
    degenerate_triangle_mask,
    dihedral_angles,
    pinned_dihedral_angles,
    projection_coeffs,
    signed_volume,
    solid_angle,
    solid_angle_sum,
    solid_angles,
    spherical_excess,
    tetrahedron_volume,
    triangle_angles,
    triangle_projection_t,
)
from src.geometry.predicates import (
    cone_events,
    f_ratio_dot_products,
    f_ratio_forms,
    is_2_well_centered,
    is_3_well_centered,
    is_acute_tetrahedron,
    is_acute_triangle,
    pinned_triangle_f_ratio,
    projections_inside_faces,
    shadow_is_triangle,
    triangle_f_ratio,
)

__all__ = [
    "circumcenter_tetra",
    "circumcenter_triangle",
    "degenerate_tetra_mask",
    "degenerate_triangle_mask",
    "dihedral_angles",
    "pinned_dihedral_angles",
    "projection_coeffs",
    "signed_volume",
    "solid_angle",
    "solid_angle_sum",
    "solid_angles",
    "spherical_excess",
    "tetrahedron_volume",
    "triangle_angles",
    "triangle_projection_t",
    "cone_events",
    "f_ratio_dot_products",
    "f_ratio_forms",
    "is_2_well_centered",
    "is_3_well_centered",
    "is_acute_tetrahedron",
    "is_acute_triangle",
    "pinned_triangle_f_ratio",
    "projections_inside_faces",
    "shadow_is_triangle",
    "triangle_f_ratio",
]
