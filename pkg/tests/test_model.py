"""
Tests for model parameters, stability and the switch-epoch recursion
"""

import pydantic
import pytest

from fluid_polling.core.model import (
    AsymmetricParams, SymmetricParams, WorkloadState, is_stable, stability_margins,
    switch_epoch_update, total_workload_scale,
)
from fluid_polling.utils.validators import ValidationError


def test_symmetric_margins_equal_half_minus_rho():
    p = SymmetricParams.from_rho(0.4, 1.0, 0.1).to_asymmetric()
    m1, m2 = stability_margins(p)
    assert m1 == pytest.approx(0.1)
    assert m2 == pytest.approx(0.1)
    assert is_stable(p)
    assert total_workload_scale(p) == pytest.approx(0.1)


def test_overloaded_system_is_unstable():
    p = SymmetricParams.from_rho(0.6, 1.0, 0.1).to_asymmetric()
    assert not is_stable(p)
    assert not SymmetricParams.from_rho(0.6, 1.0, 0.1).stable


def test_asymmetric_margins_use_visit_shares():
    p = AsymmetricParams(lambda1=0.2, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=3.0)
    m1, m2 = stability_margins(p)
    assert m1 == pytest.approx(0.75 - 0.2)
    assert m2 == pytest.approx(0.25 - 0.1)


def test_swapped_relabels_queues():
    p = AsymmetricParams(lambda1=0.2, lambda2=0.1, mu1=1.0, mu2=2.0, c1=1.0, c2=3.0)
    q = p.swapped()
    assert (q.lambda1, q.mu1, q.c1) == (0.1, 2.0, 3.0)
    assert stability_margins(q) == pytest.approx(stability_margins(p)[::-1])


def test_zero_input_rate_is_allowed():
    p = AsymmetricParams(lambda1=0.0, lambda2=0.0, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0)
    assert is_stable(p)


@pytest.mark.parametrize("field", ["mu1", "c2"])
def test_nonpositive_rates_are_rejected(field):
    values = dict(lambda1=0.1, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0)
    values[field] = 0.0
    with pytest.raises(pydantic.ValidationError):
        AsymmetricParams(**values)


def test_symmetric_params_accept_alias_and_name():
    by_alias = SymmetricParams(**{"lambda": 0.3, "mu": 1.0, "c": 0.5})
    by_name = SymmetricParams(lam=0.3, mu=1.0, c=0.5)
    assert by_alias == by_name
    assert by_alias.rho == pytest.approx(0.3)


def test_switch_epoch_update_hand_example():
    p = SymmetricParams(lam=0.25, mu=1.0, c=1.0).to_asymmetric()
    v1, v2 = switch_epoch_update(1.0, 0.0, 1.0, 1.0, p)
    assert v1 == pytest.approx(0.5)
    assert v2 == pytest.approx(0.0)


def test_switch_epoch_update_rejects_negative_durations():
    p = SymmetricParams(lam=0.25, mu=1.0, c=1.0).to_asymmetric()
    with pytest.raises(ValidationError):
        switch_epoch_update(0.0, 0.0, -1.0, 1.0, p)


def test_workload_state_validates_server():
    with pytest.raises(ValidationError):
        WorkloadState(v1=0.0, v2=0.0, serving=3)


@pytest.mark.parametrize("state, expected", [
    ((0.0, 0.0, 2.0, 3.0), (1.2, 0.0)),
    ((1.0, 1.0, 1.0, 1.0), (0.8, 0.8)),
    ((5.0, 0.0, 10.0, 0.0), (0.0, 4.0)),
])
def test_switch_epoch_update_examples(state, expected):
    p = SymmetricParams(lam=0.4, mu=1.0, c=1.0).to_asymmetric()
    assert switch_epoch_update(*state, p) == pytest.approx(expected)


def test_switch_epoch_update_without_input_stays_empty():
    p = AsymmetricParams(lambda1=0.0, lambda2=0.0, mu1=1.0, mu2=2.0, c1=1.0, c2=1.0)
    assert switch_epoch_update(0.0, 0.0, 3.0, 4.0, p) == (0.0, 0.0)


@pytest.mark.parametrize("t1, t2", [(0.0, 0.0), (0.5, 2.0), (3.0, 0.1), (10.0, 10.0)])
def test_switch_epoch_update_is_monotone_and_nonnegative(t1, t2):
    p = AsymmetricParams(lambda1=0.3, lambda2=0.2, mu1=1.0, mu2=0.8, c1=1.0, c2=2.0)
    starts = [0.0, 0.1, 0.5, 1.0, 2.5, 7.0]
    for v2 in starts:
        firsts = [switch_epoch_update(v1, v2, t1, t2, p)[0] for v1 in starts]
        assert all(b >= a for a, b in zip(firsts, firsts[1:]))
    for v1 in starts:
        seconds = [switch_epoch_update(v1, v2, t1, t2, p)[1] for v2 in starts]
        assert all(b >= a for a, b in zip(seconds, seconds[1:]))
        assert min(seconds) >= 0.0


@pytest.mark.parametrize("rates, expected, stable", [
    (dict(lambda1=0.4, lambda2=0.4, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0), (0.1, 0.1), True),
    (dict(lambda1=0.0, lambda2=0.0, mu1=2.0, mu2=3.0, c1=1.0, c2=3.0), (0.75, 0.25), True),
    (dict(lambda1=0.6, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0), (-0.1, 0.4), False),
    (dict(lambda1=0.5, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0), (0.0, 0.4), False),
])
def test_stability_margin_examples(rates, expected, stable):
    p = AsymmetricParams(**rates)
    assert stability_margins(p) == pytest.approx(expected)
    assert is_stable(p) is stable


@pytest.mark.parametrize("rates", [
    dict(lambda1=0.6, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0),
    dict(lambda1=0.2, lambda2=0.9, mu1=0.5, mu2=3.0, c1=0.3, c2=2.0),
    dict(lambda1=0.0, lambda2=1.5, mu1=4.0, mu2=2.0, c1=5.0, c2=0.1),
])
def test_stability_margins_swap_with_queue_labels(rates):
    p = AsymmetricParams(**rates)
    m1, m2 = stability_margins(p)
    assert stability_margins(p.swapped()) == pytest.approx((m2, m1))
    assert is_stable(p.swapped()) == is_stable(p)
