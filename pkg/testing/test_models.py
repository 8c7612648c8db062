"""
Tests for the pydantic models and carriers.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.models.config import Command, RunConfig
from src.models.densities import ComplexValue, MillerParams
from src.models.geometry import Point3, Tetrahedron, as_points
from src.models.quadrature import QuadratureResult, QuadratureSpec
from src.models.sampling import EmpiricalDistribution, MCEstimate
from src.utils.errors import NotPositiveDefiniteError


def estimate(**overrides) -> MCEstimate:
    fields = dict(name="e", p_hat=0.5, n=100, stderr=0.05, ci_low=0.4, ci_high=0.6, seed=1)
    fields.update(overrides)
    return MCEstimate(**fields)


class TestMCEstimate:
    def test_z_score(self):
        assert estimate().z_score(0.6) == pytest.approx(-2.0)
        assert estimate().agrees_with(0.6, k=4.0)
        assert not estimate().agrees_with(0.8, k=4.0)

    def test_zero_stderr(self):
        exact = estimate(stderr=0.0, p_hat=1.0, ci_low=1.0, ci_high=1.0)
        assert exact.z_score(1.0) == 0.0
        assert math.isinf(exact.z_score(0.9))

    def test_probability_bounds(self):
        with pytest.raises(ValidationError):
            estimate(p_hat=1.5, ci_high=2.0)
        with pytest.raises(ValidationError):
            estimate(ci_low=0.55)

    def test_used_trials(self):
        assert estimate(excluded=3).used == 97


class TestQuadratureModels:
    def test_converged_claim_must_meet_target(self):
        with pytest.raises(ValidationError):
            QuadratureResult(value=1.0, error_estimate=1e-3, evaluations=10, converged=True)
        QuadratureResult(value=1.0, error_estimate=1e-3, evaluations=10, converged=False)

    def test_target(self):
        spec = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-6)
        assert spec.target(10.0) == pytest.approx(1e-5)
        assert spec.target(0.0) == 1e-8


class TestCarriers:
    def test_points_need_three_coordinates(self):
        with pytest.raises(ValueError):
            as_points([1.0, 2.0])
        with pytest.raises(ValueError):
            as_points([1.0, math.nan, 0.0])

    def test_planar_point_defaults(self):
        assert np.array_equal(Point3(1.0, 2.0).as_array(), [1.0, 2.0, 0.0])

    def test_batch_take(self):
        points = np.arange(24, dtype=float).reshape(2, 4, 3)
        t = Tetrahedron(points[:, 0], points[:, 1], points[:, 2], points[:, 3])
        assert len(t) == 2
        assert np.array_equal(t.take(1).d, points[1, 3])

    def test_empirical_distribution(self):
        samples = EmpiricalDistribution(np.array([3.0, 1.0, 2.0, 4.0]))
        assert np.array_equal(samples.values, [1.0, 2.0, 3.0, 4.0])
        assert samples.cdf(2.0) == 0.5
        assert samples.mean() == 2.5

    def test_complex_value(self):
        value = ComplexValue.from_complex(3 + 4j)
        assert abs(value) == 5.0
        with pytest.raises(ValueError):
            ComplexValue.from_complex(complex(math.inf, 0.0))

    def test_miller_params_validate_their_blocks(self):
        with pytest.raises(NotPositiveDefiniteError):
            MillerParams(p=2, omega_block=np.eye(2), v=np.zeros(2), omega=-1.0, sqrt_det=1.0)
        with pytest.raises(ValueError):
            MillerParams(p=2, omega_block=np.eye(3), v=np.zeros(2), omega=1.0, sqrt_det=1.0)


class TestRunConfig:
    def test_estimate_needs_name_and_trials(self):
        with pytest.raises(ValidationError):
            RunConfig(command=Command.ESTIMATE, n=1000)
        with pytest.raises(ValidationError):
            RunConfig(command=Command.ESTIMATE, name="gamma-cone", n=99)

    def test_report_fields_drop_output_path(self):
        config = RunConfig(command=Command.ANALYTIC, name="gamma-cone", output_path="out.json")
        fields = config.report_fields()
        assert "output_path" not in fields
        assert fields["command"] == "analytic"
        assert "n" not in fields
