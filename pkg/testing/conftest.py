"""
Shared fixtures: reference tetrahedra, a small thread pool and a clean environment.
"""
import numpy as np
import pytest

from src.models.geometry import Tetrahedron
from src.services.events import CORNER_TETRA, REGULAR_TETRA
from src.services.sampling import MonteCarloService


@pytest.fixture
def regular_tetra() -> Tetrahedron:
    return REGULAR_TETRA


@pytest.fixture
def corner_tetra() -> Tetrahedron:
    return CORNER_TETRA


@pytest.fixture
def skew_tetra() -> Tetrahedron:
    """Well-shaped tetrahedron without any symmetry."""
    return Tetrahedron.from_points((0.0, 0.0, 0.0), (1.2, 0.1, -0.3), (0.2, 0.9, 0.4), (-0.1, 0.3, 1.1))


@pytest.fixture
def gaussian_points():
    """Four batches of 10⁴ standard Gaussian points from a fixed numpy stream."""
    rng = np.random.default_rng(2024)
    return tuple(rng.standard_normal((10_000, 3)) for _ in range(4))


@pytest.fixture
def service(monkeypatch) -> MonteCarloService:
    monkeypatch.delenv("GTET_THREADS", raising=False)
    return MonteCarloService(threads=2)
