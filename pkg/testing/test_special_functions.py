"""
Tests for log Γ, K_{1/2} and the F(2, 2) tail.
"""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special, stats

from src.numerics.special_functions import bessel_k_half, bessel_k_half_scaled, f22_tail, log_gamma
from src.utils.errors import DomainError

positive = st.floats(min_value=1e-3, max_value=50.0)


def test_log_gamma_values():
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)


def test_log_gamma_keeps_array_shape():
    values = log_gamma(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert values.shape == (2, 2)
    assert np.allclose(values, [[0.0, 0.0], [math.log(2.0), math.log(6.0)]])


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_log_gamma_domain(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)


@given(positive)
def test_bessel_k_half_matches_scipy(theta):
    assert bessel_k_half(theta) == pytest.approx(special.kv(0.5, theta), rel=1e-12)


def test_bessel_k_half_domain():
    with pytest.raises(DomainError):
        bessel_k_half(0.0)


@given(st.floats(min_value=0.0, max_value=1e6))
def test_f22_tail_matches_f_distribution(x):
    assert f22_tail(x) == pytest.approx(stats.f(2, 2).sf(x), rel=1e-9)


def test_f22_tail_values():
    assert f22_tail(0.0) == 1.0
    assert f22_tail(1.0) == 0.5
    with pytest.raises(DomainError):
        f22_tail(-0.1)


def test_log_gamma_half_integers():
    assert math.exp(log_gamma(4.5)) == pytest.approx(105 * math.sqrt(math.pi) / 16, rel=1e-13)
    # Γ(21/2) = Γ(1/2) · (1/2)(3/2)...(19/2)
    by_recurrence = 0.5 * math.log(math.pi) + math.fsum(math.log(j + 0.5) for j in range(10))
    assert log_gamma(10.5) == pytest.approx(by_recurrence, abs=1e-12)


def test_log_gamma_recurrence():
    grid = np.linspace(0.05, 40.0, 400)
    assert np.allclose(log_gamma(grid + 1.0) - log_gamma(grid), np.log(grid), rtol=0, atol=1e-12)


def test_bessel_k_half_at_one():
    assert bessel_k_half(1.0) == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-14)


def test_bessel_k_half_matches_integral_representation():
    # K_ν(θ) = ∫₀^∞ exp(−θ cosh t) cosh(νt) dt
    value, _ = integrate.quad(lambda t: math.exp(-2.0 * math.cosh(t)) * math.cosh(0.5 * t), 0.0, 10.0,
                              epsabs=0.0, epsrel=1e-13, limit=200)
    assert bessel_k_half(2.0) == pytest.approx(value, rel=1e-12)


def test_bessel_k_half_decreases_to_zero():
    values = bessel_k_half(np.linspace(0.5, 700.0, 2000))
    assert np.all(np.diff(values) < 0)
    assert values[-1] < 1e-300


@given(positive)
def test_bessel_k_half_scaled_matches_scipy(theta):
    assert bessel_k_half_scaled(theta) == pytest.approx(special.kve(0.5, theta), rel=1e-12)


def test_bessel_k_half_scaled_domain():
    assert bessel_k_half_scaled(2.0) * math.exp(-2.0) == pytest.approx(bessel_k_half(2.0), rel=1e-14)
    with pytest.raises(DomainError):
        bessel_k_half_scaled(-1.0)


def test_f22_tail_cone_thresholds():
    assert f22_tail(1 / 3) == pytest.approx(0.75, rel=1e-14)
    assert f22_tail(3 - 2 * math.sqrt(2)) == pytest.approx((2 + math.sqrt(2)) / 4, rel=1e-14)


@pytest.mark.parametrize("x", [1 / 3, 1.0, 3 - 2 * math.sqrt(2)])
def test_f22_tail_matches_chi_square_ratio_sampling(x):
    rng = np.random.default_rng(11)
    n = 400_000
    # the two χ²₂/2 factors cancel in the ratio
    ratio = rng.chisquare(2, n) / rng.chisquare(2, n)
    p_hat = float(np.mean(ratio > x))
    stderr = math.sqrt(p_hat * (1 - p_hat) / n)
    assert abs(p_hat - f22_tail(x)) < 4 * stderr
