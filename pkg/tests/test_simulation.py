"""
Tests for the fluid polling simulator
"""

import numpy as np
import pydantic
import pytest

from fluid_polling.core import exact
from fluid_polling.core.model import AsymmetricParams, SymmetricParams, WorkloadState
from fluid_polling.core.simulation import (
    MomentAccumulator, SimConfig, batch_ci, lindley, segment_accumulate, segment_integrals, simulate,
    simulate_many,
)
from fluid_polling.core.verification import EcdfRow, ecdf_verdict
from fluid_polling.utils.validators import ValidationError


@pytest.fixture
def drain_params():
    return AsymmetricParams(lambda1=0.0, lambda2=0.0, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0)


def short_config(**overrides):
    values = {"seed": 7, "total_time": 2000.0, "warmup_time": 200.0, "batch_count": 5}
    values.update(overrides)
    return SimConfig(**values)


class TestSegments:
    def test_draining_queue_forms_a_triangle(self, drain_params):
        state = WorkloadState(v1=1.0, v2=0.0, serving=1)
        acc = segment_accumulate(state, 2.0, MomentAccumulator(), drain_params)
        assert acc.time == 2.0
        assert acc.s1 == pytest.approx(0.5)
        assert acc.s11 == pytest.approx(1.0 / 3.0)
        assert acc.z1 == pytest.approx(1.0)
        assert acc.z2 == pytest.approx(2.0)
        assert acc.s12 == 0.0

    def test_idle_queue_grows_linearly(self):
        p = AsymmetricParams(lambda1=1.0, lambda2=0.0, mu1=3.0, mu2=1.0, c1=1.0, c2=1.0)
        state = WorkloadState(v1=1.0, v2=0.0, serving=2)
        acc = segment_accumulate(state, 1.0, MomentAccumulator(), p)
        assert acc.s1 == pytest.approx(1.5)
        assert acc.s11 == pytest.approx(7.0 / 3.0)
        assert acc.z1 == 0.0

    def test_negative_duration_is_rejected(self, drain_params):
        with pytest.raises(ValidationError):
            segment_accumulate(WorkloadState(v1=0.0, v2=0.0, serving=1), -1.0, MomentAccumulator(), drain_params)

    def test_integrals_split_consistently(self):
        rng = np.random.default_rng(3)
        x0, y0 = rng.uniform(0, 2, 50), rng.uniform(0, 2, 50)
        a, b = rng.uniform(-2, 2, 50), rng.uniform(-2, 2, 50)
        duration = rng.uniform(0.1, 3, 50)
        first = duration * rng.uniform(0.1, 0.9, 50)
        whole = segment_integrals(x0, a, y0, b, duration)
        head = segment_integrals(x0, a, y0, b, first)
        x_mid = np.maximum(0.0, x0 + a * first)
        y_mid = np.maximum(0.0, y0 + b * first)
        tail = segment_integrals(x_mid, a, y_mid, b, duration - first)
        for w, h, t in zip(whole, head, tail):
            np.testing.assert_allclose(w, h + t, rtol=1e-10, atol=1e-12)

    def test_merge_is_commutative(self):
        left = MomentAccumulator(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)
        right = MomentAccumulator(0.5, 0.25, 0.0, 1.0, 2.0, 3.0, 0.0, 1.0)
        assert left + right == right + left


class TestLindley:
    def naive(self, increments, floors, start):
        out, v = [], start
        for k, d in enumerate(increments):
            g = 0.0 if floors is None else floors[k]
            v = max(v + d, g)
            out.append(v)
        return np.array(out)

    @pytest.mark.parametrize("with_floors", [False, True])
    def test_matches_step_by_step_recursion(self, with_floors):
        rng = np.random.default_rng(11)
        increments = rng.normal(-0.1, 1.0, 500)
        floors = rng.uniform(0.0, 0.5, 500) if with_floors else None
        np.testing.assert_allclose(lindley(increments, floors, 2.0), self.naive(increments, floors, 2.0),
                                   atol=1e-9)


class TestBatchCi:
    def test_interval_around_mean(self):
        low, high = batch_ci([1.0, 2.0, 3.0])
        half = 1.959963984540054 / np.sqrt(3.0)
        assert low == pytest.approx(2.0 - half)
        assert high == pytest.approx(2.0 + half)

    def test_single_batch_is_rejected(self):
        with pytest.raises(ValidationError):
            batch_ci([1.0])

    def test_level_must_be_a_probability(self):
        with pytest.raises(ValidationError):
            batch_ci([1.0, 2.0], level=1.5)


class TestSimConfig:
    def test_warmup_must_precede_end(self):
        with pytest.raises(pydantic.ValidationError):
            SimConfig(total_time=10.0, warmup_time=10.0)

    def test_needs_two_batches(self):
        with pytest.raises(pydantic.ValidationError):
            SimConfig(total_time=10.0, batch_count=1)

    def test_batch_length(self):
        assert SimConfig(total_time=110.0, warmup_time=10.0, batch_count=4).batch_length == 25.0


class TestSimulate:
    def test_empty_system_stays_empty(self, drain_params):
        result = simulate(drain_params, short_config())
        assert result.mean_v1 == 0.0
        assert result.mean_v2 == 0.0
        assert result.frac_zero1 == pytest.approx(1.0)
        assert result.correlation == 0.0
        assert result.ecdf_total.size == 1800

    def test_ecdf_sample_cap_widens_interval(self):
        p = SymmetricParams.from_rho(0.3, 1.0, 1.0).to_asymmetric()
        result = simulate(p, short_config(ecdf_max_samples=100))
        assert result.ecdf_total.size == 100
        assert result.metadata["ecdf_interval"] == pytest.approx(18.0)

    def test_same_seed_same_result(self):
        p = SymmetricParams.from_rho(0.3, 1.0, 1.0).to_asymmetric()
        first = simulate(p, short_config())
        second = simulate(p, short_config())
        assert first.to_dict() == second.to_dict()

    def test_streams_differ(self):
        p = SymmetricParams.from_rho(0.3, 1.0, 1.0).to_asymmetric()
        assert simulate(p, short_config()).mean_v1 != simulate(p, short_config(stream=1)).mean_v1

    def test_interval_brackets_estimate(self):
        p = SymmetricParams.from_rho(0.4, 1.0, 1.0).to_asymmetric()
        result = simulate(p, short_config(total_time=2.0e4, batch_count=10))
        assert result.ci_low <= result.correlation <= result.ci_high
        assert -1.0 <= result.correlation <= 1.0

    def test_many_preserves_order(self):
        runs = [(SymmetricParams.from_rho(rho, 1.0, 1.0).to_asymmetric(), short_config(stream=i))
                for i, rho in enumerate((0.1, 0.4))]
        results = simulate_many(runs)
        assert results[0].mean_v1 < results[1].mean_v1

    def test_unstable_run_still_completes(self):
        p = SymmetricParams.from_rho(0.7, 1.0, 1.0).to_asymmetric()
        result = simulate(p, short_config())
        assert result.metadata["stable"] is False
        assert result.metadata["scale"] == 1.0

    @pytest.mark.parametrize("rho", [0.3, 0.45])
    def test_marginal_mean_and_atom_match_exact_law(self, rho):
        p = SymmetricParams.from_rho(rho, 1.0, 1.0).to_asymmetric()
        result = simulate(p, SimConfig(seed=5, total_time=2.0e5, warmup_time=2.0e3, batch_count=20))
        mean, atom = exact.marginal_mean(p, 1), exact.marginal_atom(p, 1)
        assert abs(result.mean_v1 - mean) < 4 * result.mean_v1_se + 0.01 * mean
        assert abs(result.frac_zero1 - atom) < 4 * result.frac_zero1_se + 0.005


@pytest.mark.parametrize("ks_light, ks_heavy, expected", [
    (0.08, 0.02, (True, True)),
    (0.01, 0.03, (True, False)),
    (0.20, 0.06, (False, True)),
    (0.08, 0.05, (False, True)),
])
def test_ecdf_verdict_separates_threshold_and_trend(ks_light, ks_heavy, expected):
    rows = [EcdfRow(rho=0.49, ks=ks_heavy, samples=100), EcdfRow(rho=0.2, ks=ks_light, samples=100)]
    assert ecdf_verdict(rows, 0.05) == expected


@pytest.mark.slow
def test_table1_desk_bands():
    from fluid_polling.core.verification import verify_table1
    report = verify_table1(level="desk", rhos=(0.2, 0.4, 0.49), workers=3)
    assert report.passed, report.rows


@pytest.mark.slow
def test_ecdf_desk_threshold():
    from fluid_polling.core.verification import verify_ecdf
    report = verify_ecdf(level="desk", workers=2)
    assert report.passed, report.rows
    assert report.trend_ok, report.rows
