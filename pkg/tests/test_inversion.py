"""
Tests for Talbot inversion and the ECDF utilities
"""

import math

import numpy as np
import pytest

from fluid_polling.core.inversion import (
    Ecdf, LstEvaluator, ks_distance, tabulated_cdf, talbot_cdf_grid, talbot_invert_cdf,
    talbot_invert_pdf, talbot_pdf_grid,
)
from fluid_polling.utils.validators import DomainError, ValidationError


@pytest.fixture
def exponential():
    return LstEvaluator(func=lambda s: 1.0 / (1.0 + s), abscissa=-1.0, name="exp")


def test_talbot_exponential_density(exponential):
    assert talbot_invert_pdf(exponential, 1.0, m=32) == pytest.approx(math.exp(-1.0), abs=1e-8)


def test_talbot_node_doubling_is_stable(exponential):
    coarse = talbot_invert_pdf(exponential, 1.0, m=20)
    fine = talbot_invert_pdf(exponential, 1.0, m=40)
    assert abs(coarse - fine) < 1e-6


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 3.0, 10.0])
def test_talbot_node_doubling_reaches_plateau(exponential, x):
    coarse = talbot_pdf_grid(exponential, [x], m=32)
    fine = talbot_pdf_grid(exponential, [x], m=64)
    assert abs(coarse[0] - fine[0]) < 1e-10
    assert fine[0] == pytest.approx(math.exp(-x), abs=1e-12)


def test_talbot_odd_node_count_hits_the_real_axis(exponential):
    assert talbot_invert_pdf(exponential, 1.0, m=33) == pytest.approx(math.exp(-1.0), rel=1e-10)


def test_talbot_exponential_cdf(exponential):
    xs = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
    np.testing.assert_allclose(talbot_cdf_grid(exponential, xs), 1.0 - np.exp(-xs), atol=1e-9)
    assert talbot_invert_cdf(exponential, 1.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-9)


def test_talbot_gamma_density_grid():
    gamma2 = LstEvaluator(func=lambda s: 1.0 / (1.0 + s) ** 2, abscissa=-1.0)
    xs = np.linspace(0.2, 8.0, 20)
    np.testing.assert_allclose(talbot_pdf_grid(gamma2, xs), xs * np.exp(-xs), atol=1e-9)


def test_talbot_rejects_nonpositive_points(exponential):
    with pytest.raises(DomainError):
        talbot_invert_pdf(exponential, 0.0)


def test_evaluator_checks_normalisation():
    with pytest.raises(ValidationError):
        LstEvaluator(func=lambda s: 2.0 / (1.0 + s))


def test_tabulated_cdf_is_monotone(exponential):
    cdf = tabulated_cdf(exponential, 20.0, points=401)
    values = cdf(np.linspace(-1.0, 25.0, 300))
    assert np.all(np.diff(values) >= 0)
    assert cdf(-1.0) == 0.0
    assert cdf(25.0) == 1.0
    assert cdf(1.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-3)


def test_ecdf_is_right_continuous():
    e = Ecdf.from_samples([3.0, 1.0, 2.0, 2.0])
    assert list(e.values) == [1.0, 2.0, 2.0, 3.0]
    np.testing.assert_allclose(e.evaluate([0.5, 1.0, 2.0, 2.5, 3.0]), [0.0, 0.25, 0.75, 0.75, 1.0])


def test_ecdf_curve_ends_at_one():
    e = Ecdf.from_samples(np.arange(10_000, dtype=float))
    curve = e.curve(max_points=100)
    assert len(curve) <= 101
    assert curve[-1] == (9999.0, 1.0)


def test_ks_distance_of_exact_sample_is_small():
    rng = np.random.default_rng(3)
    e = Ecdf.from_samples(rng.exponential(size=50_000))
    assert ks_distance(e, lambda x: 1.0 - np.exp(-np.asarray(x))) < 0.01


def test_ks_distance_of_empty_ecdf_raises():
    with pytest.raises(ValidationError):
        ks_distance(Ecdf.from_samples([]), lambda x: x)
