"""
Tests for the exact marginal law, kernel roots and ellipse geometry
"""

import numpy as np
import pytest

from fluid_polling.core import exact
from fluid_polling.core.model import AsymmetricParams, SymmetricParams
from fluid_polling.utils.validators import UnstableSystemError


@pytest.fixture
def sym():
    return SymmetricParams(lam=0.25, mu=1.0, c=1.0)


def test_marginal_lst_is_one_at_zero(sym):
    p = sym.to_asymmetric()
    assert exact.marginal_lst(p, 1, 0.0) == pytest.approx(1.0)


def test_marginal_constants_symmetric_case(sym):
    p = sym.to_asymmetric()
    rho = 0.25
    a = 0.25 / 2.0
    b = 0.25 * (1 - rho) / (1 - 2 * rho)
    assert exact.marginal_atom(p, 1) == pytest.approx(a / b)
    assert exact.marginal_mean(p, 1) == pytest.approx(b - a)
    assert exact.marginal_second_moment(p, 1) == pytest.approx(2 * b * (b - a))


def test_marginal_convolution_identity():
    p = SymmetricParams.from_rho(0.45, 1.0, 0.1).to_asymmetric()
    theta1, theta2 = exact.marginal_thetas(p, 1)
    s = np.linspace(0.0, 20.0, 201)
    lhs = exact.marginal_lst(p, 1, s) * theta1 / (theta1 + s)
    np.testing.assert_allclose(lhs, theta2 / (theta2 + s), rtol=0, atol=1e-12)


@pytest.mark.parametrize("j", [1, 2])
def test_marginal_convolution_identity_asymmetric_complex_grid(j):
    p = AsymmetricParams(lambda1=0.2, lambda2=0.1, mu1=1.0, mu2=0.7, c1=1.0, c2=3.0)
    theta1, theta2 = exact.marginal_thetas(p, j)
    re, im = np.meshgrid(np.linspace(0.0, 10.0, 21), np.linspace(-10.0, 10.0, 21))
    s = re + 1j * im
    lhs = exact.marginal_lst(p, j, s) * theta1 / (theta1 + s)
    np.testing.assert_allclose(lhs, theta2 / (theta2 + s), rtol=0, atol=1e-12)


@pytest.mark.parametrize("rho", [0.05, 0.25, 0.45, 0.499])
def test_marginal_lst_is_bounded_on_right_half_plane(rho):
    p = SymmetricParams.from_rho(rho, 1.0, 0.1).to_asymmetric()
    rng = np.random.default_rng(11)
    s = rng.exponential(5.0, 500) + 1j * rng.normal(0.0, 20.0, 500)
    s[:50] = 1j * rng.normal(0.0, 20.0, 50)
    assert np.all(np.abs(exact.marginal_lst(p, 1, s)) <= 1.0 + 1e-12)


def test_marginal_lst_queue_symmetry():
    p = AsymmetricParams(lambda1=0.2, lambda2=0.1, mu1=1.0, mu2=1.0, c1=1.0, c2=3.0)
    s = np.linspace(0.0, 5.0, 11)
    np.testing.assert_allclose(exact.marginal_lst(p, 2, s), exact.marginal_lst(p.swapped(), 1, s))


def test_zero_input_gives_point_mass():
    p = AsymmetricParams(lambda1=0.0, lambda2=0.0, mu1=1.0, mu2=1.0, c1=1.0, c2=1.0)
    assert exact.marginal_atom(p, 1) == 1.0
    assert exact.marginal_mean(p, 1) == 0.0


def test_unstable_marginal_raises():
    p = SymmetricParams.from_rho(0.6, 1.0, 0.1).to_asymmetric()
    with pytest.raises(UnstableSystemError):
        exact.marginal_lst(p, 1, 1.0)


def test_ht_marginal_limit_mean_symmetric():
    p = SymmetricParams.from_rho(0.45, 1.0, 0.1).to_asymmetric()
    assert exact.ht_marginal_limit_mean(p, 1) == pytest.approx(1.0 / (8 * 0.1))


def test_branch_points_hand_values(sym):
    low, high = exact.branch_points(sym)
    assert low == pytest.approx(2 - np.sqrt(3), rel=1e-12)
    assert high == pytest.approx(2 + np.sqrt(3), rel=1e-12)
    assert abs(exact.discriminant(sym, low)) < 1e-12
    assert abs(exact.discriminant(sym, high)) < 1e-12


def test_roots_coincide_at_branch_points(sym):
    for point in exact.branch_points(sym):
        minus, plus = exact.kernel_roots_s2(sym, point)
        assert abs(minus - plus) <= 1e-12


def test_kernel_root_back_substitution(sym):
    rng = np.random.default_rng(7)
    s1 = rng.uniform(-2, 6, 40) + 1j * rng.uniform(-3, 3, 40)
    for root in exact.kernel_roots_s2(sym, s1):
        scale = np.maximum(1.0, np.abs(s1)) ** 2
        assert np.max(np.abs(exact.kernel(sym, s1, root)) / scale) < 1e-10


def test_roots_at_s1_one_hand_example(sym):
    minus, plus = exact.kernel_roots_s2(sym, 1.0)
    for root in (minus, plus):
        assert root.real == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert abs(root.imag) == pytest.approx(np.sqrt(32.0 / 9.0), abs=1e-12)


def test_ellipse_membership_between_branch_points(sym):
    geometry = exact.ellipse_geometry(sym)
    assert geometry.r_sq == pytest.approx(16.0 / 3.0)
    low, high = exact.branch_points(sym)
    for s1 in np.linspace(low, high, 52)[1:-1]:
        for root in exact.kernel_roots_s2(sym, s1):
            assert abs(geometry.residual(root.real, root.imag)) < 1e-10 * max(1.0, geometry.r_sq)
            assert exact.s1_from_u(sym, root.real) == pytest.approx(s1, abs=1e-10)


def test_ellipse_extent_matches_branch_point_roots(sym):
    geometry = exact.ellipse_geometry(sym)
    reals = sorted(exact.kernel_roots_s2(sym, b)[0].real for b in exact.branch_points(sym))
    assert reals[0] == pytest.approx(geometry.u_min, abs=1e-6)
    assert reals[1] == pytest.approx(geometry.u_max, abs=1e-6)
    assert geometry.u_min < 0


def test_boundary_ab_hand_example(sym):
    u, v = 1.0 / 3.0, np.sqrt(32.0 / 9.0)
    a, b = exact.boundary_ab(sym, u, v)
    s2 = complex(u, v)
    expected = -1j * exact.f_bilinear(sym, s2, 1.0) / (sym.c * s2)
    assert a == pytest.approx(expected.real, abs=1e-12)
    assert b == pytest.approx(expected.imag, abs=1e-12)
    assert a == pytest.approx(-3.0 * v / 44.0, abs=1e-12)
    assert b == pytest.approx(-3.0 / 11.0, abs=1e-12)
