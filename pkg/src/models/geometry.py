"""
Geometry carriers: points, triangles, tetrahedra and the measurements taken on them.

Every carrier holds numpy arrays whose last axis has length 3, so one object can be
a single simplex (shape (3,)) or a batch of them (shape (N, 3)).
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Edge order used by DihedralAngles.edges; "ad", "bd", "cd" are the pinned α, β, γ.
EDGES = ("ab", "ac", "ad", "bc", "bd", "cd")


def as_points(value) -> np.ndarray:
    """Convert a Point3 / sequence / array to a float array with last axis 3."""
    arr = np.asarray(value, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected coordinates with last axis 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    return arr


class Point3(NamedTuple):
    """A point of Euclidean 3-space (planar points use z = 0)."""

    x: float
    y: float
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Triangle:
    """Vertices a, b, c; a 2-space triangle is embedded with z = 0."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_points(getattr(self, name)))

    @classmethod
    def from_points(cls, a, b, c) -> "Triangle":
        return cls(as_points(a), as_points(b), as_points(c))

    @property
    def vertices(self) -> tuple:
        return self.a, self.b, self.c

    def __len__(self) -> int:
        return self.a.shape[0] if self.a.ndim > 1 else 1

    def take(self, index) -> "Triangle":
        """Select one triangle (or a sub-batch) from a batch."""
        return Triangle(self.a[index], self.b[index], self.c[index])


@dataclass(frozen=True)
class Tetrahedron:
    """Vertices a, b, c, d; a pinned tetrahedron has d at the origin."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, as_points(getattr(self, name)))

    @classmethod
    def from_points(cls, a, b, c, d) -> "Tetrahedron":
        return cls(as_points(a), as_points(b), as_points(c), as_points(d))

    @property
    def vertices(self) -> tuple:
        return self.a, self.b, self.c, self.d

    def __len__(self) -> int:
        return self.a.shape[0] if self.a.ndim > 1 else 1

    def take(self, index) -> "Tetrahedron":
        """Select one tetrahedron (or a sub-batch) from a batch."""
        return Tetrahedron(self.a[index], self.b[index], self.c[index], self.d[index])

    def transformed(self, rotation: np.ndarray, shift: np.ndarray, scale: float = 1.0) -> "Tetrahedron":
        """Apply x -> scale * R x + shift to every vertex."""
        rotation = np.asarray(rotation, dtype=float)
        shift = np.asarray(shift, dtype=float)
        return Tetrahedron(*(scale * (p @ rotation.T) + shift for p in self.vertices))


@dataclass(frozen=True)
class ProjectionCoeffs:
    """r = (B−A)·(D−A)/‖B−A‖², s = (C−A)·(D−A)/‖C−A‖² plus the raw dot products."""

    r: np.ndarray
    s: np.ndarray
    dot_bd: np.ndarray
    dot_cd: np.ndarray


@dataclass(frozen=True)
class ConeEvents:
    """D̃ in Γ, D̃ in (B+C) − Γ, and D̃ in the parallelogram (their intersection)."""

    in_gamma: np.ndarray
    in_reflected: np.ndarray
    in_parallelogram: np.ndarray


@dataclass(frozen=True)
class DihedralAngles:
    """Six interior dihedral angles (radians) in EDGES order, last axis 6."""

    edges: np.ndarray

    def at(self, edge: str) -> np.ndarray:
        return self.edges[..., EDGES.index(edge)]

    @property
    def alpha(self) -> np.ndarray:
        """Angle at edge DA (the pinned α when D is the origin)."""
        return self.at("ad")

    @property
    def beta(self) -> np.ndarray:
        return self.at("bd")

    @property
    def gamma(self) -> np.ndarray:
        return self.at("cd")


@dataclass(frozen=True)
class SolidAngles:
    """Solid angles (steradians) at a, b, c, d, last axis 4."""

    vertices: np.ndarray

    @property
    def total(self) -> np.ndarray:
        """σ, the sum of the four solid angles."""
        return self.vertices.sum(axis=-1)
