"""
Exact transform-domain objects of the fluid polling model

Marginal workload LST, the bilinear kernel of the joint functional equation,
its roots and branch points, the ellipse traced by the complex roots, and the
boundary data of the associated boundary value problem.
"""

import math
from dataclasses import dataclass, asdict
from typing import Any, Dict, Tuple

import numpy as np

from fluid_polling.core.model import AsymmetricParams, SymmetricParams, is_stable
from fluid_polling.utils.numerics import as_complex, unwrap
from fluid_polling.utils.validators import (
    DomainError, UnstableSystemError, ValidationError, Validators,
)


@dataclass(frozen=True)
class EllipseGeometry:
    """Constants of v^2 + (u*kappa - tau)^2 / xi^2 = r_sq and its horizontal extent"""
    kappa: float
    tau: float
    xi: float
    r_sq: float
    u_min: float
    u_max: float

    def residual(self, u: float, v: float) -> float:
        """Signed membership residual of the point u + iv"""
        return v * v + (u * self.kappa - self.tau) ** 2 / self.xi ** 2 - self.r_sq

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _mixture_constants(p: AsymmetricParams, j: int) -> Tuple[float, float]:
    """Constants (a, b) of the marginal LST (1 + a s)/(1 + b s)"""
    Validators.queue_index(j)
    lam, mu, c_own, c_other = p.rates(j)
    if not is_stable(p):
        raise UnstableSystemError("Marginal law requested for unstable parameters")
    rho = lam / mu
    a = lam / (p.c1 + p.c2)
    denominator = c_other * (1.0 - (c_own / c_other) * rho / (1.0 - rho))
    if denominator <= 0:
        raise UnstableSystemError("Marginal law requested for unstable parameters")
    b = lam / denominator
    return a, b


def marginal_lst(p: AsymmetricParams, j: int, s: Any) -> Any:
    """Stationary LST of the workload at queue j

    Args:
        p: Stable model parameters
        j: Queue index
        s: Transform argument(s); Re[s] >= 0 is the validated domain

    Returns:
        (1 + a s)/(1 + b s)

    Raises:
        UnstableSystemError: If the parameters are unstable
    """
    a, b = _mixture_constants(p, j)
    z = as_complex(s)
    return unwrap((1.0 + a * z) / (1.0 + b * z), s)


def marginal_thetas(p: AsymmetricParams, j: int) -> Tuple[float, float]:
    """Rates (theta1, theta2) = (1/a, 1/b) of the mixture representation

    V_j is zero with probability theta2/theta1 and Exp(theta2) otherwise.
    """
    a, b = _mixture_constants(p, j)
    if a == 0:
        return math.inf, math.inf
    return 1.0 / a, 1.0 / b


def marginal_atom(p: AsymmetricParams, j: int) -> float:
    """Probability that the stationary workload at queue j is zero"""
    a, b = _mixture_constants(p, j)
    if b == 0:
        return 1.0
    return a / b


def marginal_mean(p: AsymmetricParams, j: int) -> float:
    a, b = _mixture_constants(p, j)
    return b - a


def marginal_second_moment(p: AsymmetricParams, j: int) -> float:
    a, b = _mixture_constants(p, j)
    return 2.0 * b * (b - a)


def ht_marginal_limit_mean(p: AsymmetricParams, j: int) -> float:
    """Mean of the exponential limit of (c_{3-j}/(c1+c2) - rho_j) V_j"""
    Validators.queue_index(j)
    _, mu, _, _ = p.rates(j)
    return p.c1 * p.c2 * mu / (p.c1 + p.c2) ** 3


def ht_marginal_limit_lst(p: AsymmetricParams, j: int, s: Any) -> Any:
    z = as_complex(s)
    return unwrap(1.0 / (1.0 + ht_marginal_limit_mean(p, j) * z), s)


def f_bilinear(p: SymmetricParams, s1: Any, s2: Any) -> Any:
    """f(s1, s2) = s1*lambda + c + s2*(lambda - mu)"""
    z1, z2 = as_complex(s1), as_complex(s2)
    return unwrap(z1 * p.lam + p.c + z2 * (p.lam - p.mu), s1 if np.ndim(s1) else s2)


def kernel(p: SymmetricParams, s1: Any, s2: Any) -> Any:
    """Kernel f(s1, s2) f(s2, s1) - c^2 of the joint functional equation"""
    z1, z2 = as_complex(s1), as_complex(s2)
    value = ((z1 * p.lam + p.c + z2 * (p.lam - p.mu))
             * (z2 * p.lam + p.c + z1 * (p.lam - p.mu)) - p.c ** 2)
    return unwrap(value, s1 if np.ndim(s1) else s2)


def discriminant(p: SymmetricParams, s1: Any) -> Any:
    """Delta(s1) = s1^2 - (c/mu) s1 / (1/2 - lambda/mu) + c^2/mu^2"""
    z = as_complex(s1)
    g = 0.5 - p.lam / p.mu
    ratio = p.c / p.mu
    return unwrap(z * z - ratio * z / g + ratio ** 2, s1)


def _natural_scale(p: SymmetricParams, z: np.ndarray) -> np.ndarray:
    return np.maximum.reduce([np.full(z.shape, p.c), np.abs(p.lam * z), np.abs(p.mu * z)])


def kernel_roots_s2(p: SymmetricParams, s1: Any) -> Tuple[Any, Any]:
    """Roots in s2 of kernel(p, s1, s2) = 0

    The pair is ordered ("-" root, "+" root), "+" taking the principal square
    root of Delta. Near a double root the midpoint is returned twice.

    Raises:
        ValidationError: If lambda >= mu
    """
    lam, mu, c = p.lam, p.mu, p.c
    if lam >= mu:
        raise ValidationError("Kernel roots need lambda < mu")
    z = as_complex(s1)
    a_coef = lam * (lam - mu)
    b_coef = c * (2 * lam - mu) + ((lam - mu) ** 2 + lam ** 2) * z
    c_coef = lam * (lam - mu) * z * z + c * (2 * lam - mu) * z
    delta = as_complex(discriminant(p, z))
    root = (mu - 2 * lam) * mu * np.sqrt(delta)

    q_minus = -b_coef - root
    q_plus = -b_coef + root
    minus = q_minus / (2 * a_coef)
    plus = q_plus / (2 * a_coef)
    # recover the smaller-magnitude root from the product of roots
    use_plus_big = np.abs(q_plus) >= np.abs(q_minus)
    product = c_coef / a_coef
    with np.errstate(divide="ignore", invalid="ignore"):
        small_from_plus = np.where(plus != 0, product / plus, 0.0)
        small_from_minus = np.where(minus != 0, product / minus, 0.0)
    minus = np.where(use_plus_big, small_from_plus, minus)
    plus = np.where(use_plus_big, plus, small_from_minus)

    scale = _natural_scale(p, z) / mu
    double = np.abs(delta) < 1e-14 * np.maximum(scale, p.c / mu) ** 2
    mid = -b_coef / (2 * a_coef)
    minus = np.where(double, mid, minus)
    plus = np.where(double, mid, plus)
    return unwrap(minus, s1), unwrap(plus, s1)


def branch_points(p: SymmetricParams) -> Tuple[float, float]:
    """Real zeros s1- < s1+ of the discriminant

    Raises:
        ValidationError: If lambda >= mu/2
    """
    if p.lam >= p.mu / 2:
        raise ValidationError("Branch points need lambda < mu/2")
    g = 0.5 - p.lam / p.mu
    root = math.sqrt(max(0.0, 1.0 - 4.0 * g * g))
    ratio = p.c / p.mu
    low = ratio * (1.0 - root) / (2.0 * g)
    high = ratio * (1.0 + root) / (2.0 * g)
    return low, high


def ellipse_geometry(p: SymmetricParams) -> EllipseGeometry:
    """Ellipse traced by the complex kernel roots for s1 between the branch points

    Raises:
        ValidationError: If lambda is outside (0, mu/2)
    """
    lam, mu, c = p.lam, p.mu, p.c
    if lam >= mu / 2:
        raise ValidationError("The root set is an ellipse only for 0 < lambda < mu/2")
    m = mu - 2 * lam
    served = lam * (mu - lam)
    xi = 2 * lam ** 2 - 2 * lam * mu + mu ** 2
    kappa = mu * m
    tau = c * mu
    r_sq = c ** 2 * (m ** 2 * (lam ** 2 - lam * mu + mu ** 2) + mu ** 2 * served) / (served * xi ** 2)
    r = math.sqrt(r_sq)
    return EllipseGeometry(
        kappa=kappa, tau=tau, xi=xi, r_sq=r_sq,
        u_min=(tau - r * xi) / kappa, u_max=(tau + r * xi) / kappa,
    )


def s1_from_u(p: SymmetricParams, u: float) -> float:
    """Invert the linear relation between s1 and the real part of the complex roots"""
    lam, mu, c = p.lam, p.mu, p.c
    return (c * (mu - 2 * lam) + 2 * lam * u * (mu - lam)) / (2 * lam ** 2 + mu * (mu - 2 * lam))


def boundary_ab(p: SymmetricParams, u: float, v: float) -> Tuple[float, float]:
    """Real and imaginary parts of -i f(s2, s1)/(c s2) at s2 = u + iv on the ellipse

    Raises:
        DomainError: If s2 = 0
    """
    lam, mu, c = p.lam, p.mu, p.c
    modulus = u * u + v * v
    if modulus == 0:
        raise DomainError("Boundary data is undefined at s2 = 0")
    xi = 2 * lam ** 2 - 2 * lam * mu + mu ** 2
    a = lam * v * (2 * u * (lam - mu) ** 2 - c * mu) / (c * xi * modulus)
    b = -lam * (mu * u * (c + 2 * lam * u - mu * u) + v * v * xi) / (c * xi * modulus)
    return a, b
