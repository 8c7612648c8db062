"""Gaussian random triangles and tetrahedra: sampling, analytic values and densities."""
