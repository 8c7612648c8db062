"""
Exception hierarchy for geometry, numerics and sampling failures.
"""


class GeometricProbabilityError(Exception):
    """Base class for every error raised by this package."""


class CoincidentVertexError(GeometricProbabilityError):
    """Two vertices that must differ are equal."""


class DegenerateGeometryError(GeometricProbabilityError):
    """Zero-area face, zero-volume tetrahedron, coplanar rays or collinear projections."""


class DomainError(GeometricProbabilityError, ValueError):
    """Argument outside the domain of a function."""


class NotPositiveDefiniteError(DomainError):
    """Covariance matrix is not symmetric positive definite."""


class ConvergenceError(GeometricProbabilityError):
    """A series or quadrature did not reach its tolerance."""


class NonFiniteValueError(GeometricProbabilityError):
    """A Monte Carlo functional produced NaN or infinity."""


class SamplerDegeneracyError(GeometricProbabilityError):
    """Too many degenerate samples were excluded from a Monte Carlo run."""

    def __init__(self, excluded: int, n: int, limit: float):
        self.excluded = excluded
        self.n = n
        self.limit = limit
        super().__init__(
            f"{excluded} of {n} samples were degenerate "
            f"(fraction {excluded / n:.3g} exceeds {limit:.3g})"
        )


class UnknownQuantityError(GeometricProbabilityError, KeyError):
    """Name not found in a registry of quantities, events or densities."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown name"


class DistributionError(GeometricProbabilityError):
    """Invalid distribution input (too few samples, non-monotone CDF)."""
