"""
Tests for the reflected Brownian and pre-limit simulators
"""

import numpy as np
import pytest

from fluid_polling.core.levy import (
    HTDrifts, SubordinatorSpec, SwitchLaw, levy_moments, limit_covariance, service_rates_for_drifts,
)
from fluid_polling.core.levy_sim import (
    default_dt, prelimit_simulate, rbm_simulate, simulate_reflected_bm,
)
from fluid_polling.utils.validators import ValidationError


@pytest.fixture
def symmetric():
    return HTDrifts.symmetric(2.0)


class TestReflectedBm:
    def test_default_step_shrinks_with_drift(self):
        assert default_dt(HTDrifts.symmetric(0.5)) == pytest.approx(1e-3)
        assert default_dt(HTDrifts(theta1_hat=1.0, theta2_hat=4.0)) == pytest.approx(1e-3 / 16)

    def test_path_samples_have_time_and_two_workloads(self, symmetric):
        result = rbm_simulate(symmetric, 20.0, seed=1, path_stride=1000)
        assert result.path.shape == (80, 3)
        assert np.all(result.path[:, 1:] >= 0)
        assert result.path[0, 0] == pytest.approx(0.25)

    def test_same_seed_same_moments(self, symmetric):
        first = rbm_simulate(symmetric, 10.0, seed=4)
        second = rbm_simulate(symmetric, 10.0, seed=4)
        assert first.moments == second.moments

    @pytest.mark.parametrize("scheme", ["bridge", "euler"])
    def test_stationary_mean_and_negative_correlation(self, symmetric, scheme):
        result = rbm_simulate(symmetric, 400.0, seed=8, scheme=scheme)
        expected = levy_moments(symmetric)
        assert abs(result.moments.mean1 - expected.mean1) < 0.06
        assert abs(result.moments.mean2 - expected.mean2) < 0.06
        assert result.moments.correlation < 0

    def test_empirical_transform_on_grid(self, symmetric):
        result = rbm_simulate(symmetric, 20.0, seed=2, lst_grid=[(0.0, 0.0), (1.0, 0.5)])
        assert result.lst_values[0] == pytest.approx(1.0)
        assert 0 < result.lst_values[1] < 1

    def test_unknown_scheme_is_rejected(self, symmetric):
        with pytest.raises(ValidationError):
            rbm_simulate(symmetric, 10.0, seed=1, scheme="milstein")

    def test_indefinite_covariance_is_rejected(self):
        with pytest.raises(ValidationError):
            simulate_reflected_bm((1.0, 1.0), [[1.0, 2.0], [2.0, 1.0]], 1e-3, 10.0, seed=1)

    def test_horizon_must_cover_batches(self, symmetric):
        with pytest.raises(ValidationError):
            rbm_simulate(symmetric, 1e-2, seed=1, dt=1e-3)


class TestPrelimit:
    def setup_method(self):
        self.sub = SubordinatorSpec.fluid(0.5, 0.5)
        self.sw = SwitchLaw.exponential(1.0, 1.0)
        self.mu_n = service_rates_for_drifts(self.sub, self.sw, (0.5, 0.5), 100.0)

    def test_scaled_path_sampling(self):
        result = prelimit_simulate(self.sub, self.sw, 100.0, self.mu_n, 20.0, seed=3, sample_interval=1.0)
        assert result.path.shape == (20, 3)
        np.testing.assert_allclose(result.path[:, 0], np.arange(1, 21))
        assert result.moments.mean1 > 0

    def test_reproducible(self):
        first = prelimit_simulate(self.sub, self.sw, 100.0, self.mu_n, 20.0, seed=3)
        second = prelimit_simulate(self.sub, self.sw, 100.0, self.mu_n, 20.0, seed=3)
        assert first.moments == second.moments

    def test_compound_poisson_input_runs(self):
        sub = SubordinatorSpec.compound_poisson_exponential(0.25, 0.25, 1.0, 0.25, 0.25)
        mu_n = service_rates_for_drifts(sub, self.sw, (0.5, 0.5), 100.0)
        result = prelimit_simulate(sub, self.sw, 100.0, mu_n, 20.0, seed=5)
        assert result.moments.mean1 > 0
        assert result.metadata["subordinator"]["name"] == "compound_poisson"

    def test_warmup_must_precede_horizon(self):
        with pytest.raises(ValidationError):
            prelimit_simulate(self.sub, self.sw, 100.0, self.mu_n, 10.0, seed=3, warmup=10.0)


@pytest.mark.slow
def test_reflected_bm_reaches_transform_moments():
    d = HTDrifts.symmetric(1.0)
    result = rbm_simulate(d, 1.0e5, seed=12, dt=1e-3)
    expected = levy_moments(d)
    m = result.moments
    assert abs(m.mean1 - expected.mean1) < 4 * m.mean1_se + 0.01
    assert abs(m.var1 - (expected.second1 - expected.mean1 ** 2)) < 0.05 * m.var1
    assert m.correlation == pytest.approx(-0.4203, abs=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("sub", [
    SubordinatorSpec.fluid(0.5, 0.5),
    SubordinatorSpec.compound_poisson_exponential(0.25, 0.25, 1.0, 0.25, 0.25),
])
def test_prelimit_moments_approach_reflected_limit(sub):
    sw = SwitchLaw.exponential(1.0, 1.0)
    theta = (0.5, 0.5)
    n = 1.0e4
    pre = prelimit_simulate(sub, sw, n, service_rates_for_drifts(sub, sw, theta, n), 1.0e4, seed=21)
    limit = simulate_reflected_bm(theta, limit_covariance(sub, sw), 1e-3, 1.0e4, seed=22)
    for name in ("mean1", "mean2"):
        assert getattr(pre.moments, name) == pytest.approx(getattr(limit.moments, name), rel=0.1)
    for name in ("second1", "second2"):
        assert getattr(pre.moments, name) == pytest.approx(getattr(limit.moments, name), rel=0.2)
