"""
Heavy-traffic process limit with Levy input and general alternating-renewal switching

The limit is driven by a two-dimensional Brownian motion; with unit switching
noise and hatted drifts theta_hat_j the joint stationary workload LST is

    nu(s1, s2) = (s1 s2 / k(s1, s2)) (f_1(s2)/s2 + f_2(s1)/s1)

with kernel k(s1, s2) = theta1 s1 + theta2 s2 + (s1 - s2)^2 / 2. The boundary
function f_j solves a Riemann-Hilbert problem on the j-th parabola; with
T = theta1 + theta2 its closed form is

    f_j(s) = pi sin(pi theta_j / T) s / (cosh((pi/T) sqrt(2 T s - theta_j^2)) - cos(pi theta_j / T))
"""

import math
from dataclasses import dataclass, asdict
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fluid_polling.core.heavy_traffic import ParabolaGeometry
from fluid_polling.utils.numerics import (
    as_complex, mixed_partial, richardson_central, u_over_sin, unwrap,
)
from fluid_polling.utils.validators import DomainError, ValidationError, Validators

SQRT2 = math.sqrt(2.0)
REMOVABLE_SHIFT = 1e-7


class HTDrifts(BaseModel):
    """Hatted drifts of the limiting free processes"""

    model_config = ConfigDict(frozen=True)

    theta1_hat: float = Field(gt=0, allow_inf_nan=False)
    theta2_hat: float = Field(gt=0, allow_inf_nan=False)

    @classmethod
    def symmetric(cls, theta_hat: float) -> "HTDrifts":
        return cls(theta1_hat=theta_hat, theta2_hat=theta_hat)

    @property
    def total(self) -> float:
        return self.theta1_hat + self.theta2_hat

    def theta(self, j: int) -> float:
        Validators.queue_index(j)
        return self.theta1_hat if j == 1 else self.theta2_hat

    def swapped(self) -> "HTDrifts":
        return HTDrifts(theta1_hat=self.theta2_hat, theta2_hat=self.theta1_hat)


class SwitchLaw:
    """Law of the visit-time pair (T1, T2) of one polling cycle

    Args:
        mean1: E[T1] = 1/c1
        mean2: E[T2] = 1/c2
        var1: Var[T1]
        var2: Var[T2]
        cov: Cov[T1, T2]
        sampler: (rng, size) -> (T1 draws, T2 draws)
        name: Label for exports
    """

    def __init__(self, mean1: float, mean2: float, var1: float, var2: float, cov: float,
                 sampler: Callable[[np.random.Generator, int], Tuple[np.ndarray, np.ndarray]],
                 name: str = "custom"):
        self.mean1 = Validators.positive("mean1", mean1)
        self.mean2 = Validators.positive("mean2", mean2)
        self.var1 = Validators.nonnegative("var1", var1)
        self.var2 = Validators.nonnegative("var2", var2)
        self.cov = Validators.finite("cov", cov)
        if cov * cov > var1 * var2 * (1.0 + 1e-12):
            raise ValidationError("Covariance violates the Cauchy-Schwarz bound")
        self.sampler = sampler
        self.name = name

    @property
    def c1(self) -> float:
        return 1.0 / self.mean1

    @property
    def c2(self) -> float:
        return 1.0 / self.mean2

    @property
    def p1(self) -> float:
        """Long-run fraction of time the server spends at queue 1"""
        return self.c2 / (self.c1 + self.c2)

    @property
    def p2(self) -> float:
        return 1.0 - self.p1

    def sample(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.sampler(rng, size)

    def validate(self, rng: np.random.Generator, size: int = 200_000, sigmas: float = 4.0) -> None:
        """Check sample means and variances against the declared moments

        Raises:
            ValidationError: If a sample moment deviates by more than `sigmas` standard errors
        """
        t1, t2 = self.sample(rng, size)
        for label, draws, mean, var in (("T1", t1, self.mean1, self.var1),
                                        ("T2", t2, self.mean2, self.var2)):
            se_mean = math.sqrt(max(var, 1e-300) / size)
            if abs(draws.mean() - mean) > sigmas * se_mean + 1e-12 * mean:
                raise ValidationError(f"{self.name}: sample mean of {label} disagrees with {mean}")
            se_var = float(np.std((draws - mean) ** 2)) / math.sqrt(size)
            if abs(draws.var() - var) > sigmas * se_var + 1e-12 * (var + mean * mean):
                raise ValidationError(f"{self.name}: sample variance of {label} disagrees with {var}")

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "mean1": self.mean1, "mean2": self.mean2,
                "var1": self.var1, "var2": self.var2, "cov": self.cov}

    @classmethod
    def exponential(cls, c1: float, c2: float) -> "SwitchLaw":
        """Independent exponential visits, the fluid polling model"""
        c1 = Validators.positive("c1", c1)
        c2 = Validators.positive("c2", c2)

        def sampler(rng: np.random.Generator, size: int):
            return rng.exponential(1.0 / c1, size), rng.exponential(1.0 / c2, size)

        return cls(1.0 / c1, 1.0 / c2, 1.0 / c1 ** 2, 1.0 / c2 ** 2, 0.0, sampler, "exponential")

    @classmethod
    def gamma(cls, shape: float, c1: float, c2: float) -> "SwitchLaw":
        """Independent gamma visits with means 1/c_j"""
        shape = Validators.positive("shape", shape)

        def sampler(rng: np.random.Generator, size: int):
            return (rng.gamma(shape, 1.0 / (shape * c1), size),
                    rng.gamma(shape, 1.0 / (shape * c2), size))

        return cls(1.0 / c1, 1.0 / c2, 1.0 / (shape * c1 ** 2), 1.0 / (shape * c2 ** 2), 0.0,
                   sampler, f"gamma({shape:g})")

    @classmethod
    def deterministic(cls, t1: float, t2: float) -> "SwitchLaw":
        def sampler(rng: np.random.Generator, size: int):
            return np.full(size, float(t1)), np.full(size, float(t2))

        return cls(t1, t2, 0.0, 0.0, 0.0, sampler, "deterministic")

    @classmethod
    def shared_exponential(cls, c1: float, c2: float, weight: float) -> "SwitchLaw":
        """T_j = (w E0 + (1 - w) E_j)/c_j with a common unit exponential E0"""
        w = Validators.probability("weight", weight, open_interval=False)

        def sampler(rng: np.random.Generator, size: int):
            common = rng.standard_exponential(size)
            return ((w * common + (1 - w) * rng.standard_exponential(size)) / c1,
                    (w * common + (1 - w) * rng.standard_exponential(size)) / c2)

        spread = w * w + (1 - w) ** 2
        return cls(1.0 / c1, 1.0 / c2, spread / c1 ** 2, spread / c2 ** 2, w * w / (c1 * c2),
                   sampler, f"shared_exponential({w:g})")


class SubordinatorSpec:
    """Bivariate input process: deterministic drift plus compound Poisson jumps

    Args:
        drift1: Deterministic input rate b1 into queue 1
        drift2: Deterministic input rate b2 into queue 2
        jump_rate: Poisson rate of jump epochs
        jump_sampler: (rng, size) -> (jumps into queue 1, jumps into queue 2)
        jump_mean: (E[X1], E[X2])
        jump_second: ((E[X1^2], E[X1 X2]), (E[X1 X2], E[X2^2]))
        name: Label for exports
    """

    def __init__(self, drift1: float, drift2: float, jump_rate: float = 0.0,
                 jump_sampler: Optional[Callable[[np.random.Generator, int],
                                                 Tuple[np.ndarray, np.ndarray]]] = None,
                 jump_mean: Tuple[float, float] = (0.0, 0.0),
                 jump_second: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0)),
                 name: str = "custom"):
        self.drift1 = Validators.nonnegative("drift1", drift1)
        self.drift2 = Validators.nonnegative("drift2", drift2)
        self.jump_rate = Validators.nonnegative("jump_rate", jump_rate)
        if self.jump_rate > 0 and jump_sampler is None:
            raise ValidationError("A positive jump rate needs a jump sampler")
        self.jump_sampler = jump_sampler
        self.jump_mean = tuple(float(m) for m in jump_mean)
        self.jump_second = np.asarray(jump_second, dtype=float)
        self.name = name
        if np.linalg.eigvalsh(self.covariance).min() < -1e-12:
            raise ValidationError("Jump covariance must be positive semidefinite")

    @property
    def lambdas(self) -> Tuple[float, float]:
        """Mean input rates lambda_j = b_j + rate * E[X_j]"""
        return (self.drift1 + self.jump_rate * self.jump_mean[0],
                self.drift2 + self.jump_rate * self.jump_mean[1])

    @property
    def covariance(self) -> np.ndarray:
        """Sigma = rate * E[X X^T]"""
        return self.jump_rate * self.jump_second

    def validate(self, rng: np.random.Generator, size: int = 200_000, sigmas: float = 4.0) -> None:
        """Check the jump sampler's means against the declared ones"""
        if self.jump_rate == 0:
            return
        x1, x2 = self.jump_sampler(rng, size)
        for label, draws, mean, second in (("X1", x1, self.jump_mean[0], self.jump_second[0, 0]),
                                           ("X2", x2, self.jump_mean[1], self.jump_second[1, 1])):
            if np.any(draws < 0):
                raise ValidationError(f"{self.name}: negative jumps in {label}")
            se = math.sqrt(max(second - mean * mean, 1e-300) / size)
            if abs(draws.mean() - mean) > sigmas * se + 1e-12 * mean:
                raise ValidationError(f"{self.name}: sample mean of {label} disagrees with {mean}")

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "drift1": self.drift1, "drift2": self.drift2,
                "jump_rate": self.jump_rate, "lambdas": list(self.lambdas),
                "covariance": self.covariance.tolist()}

    @classmethod
    def fluid(cls, lambda1: float, lambda2: float) -> "SubordinatorSpec":
        return cls(lambda1, lambda2, name="fluid")

    @classmethod
    def compound_poisson_exponential(cls, drift1: float, drift2: float, jump_rate: float,
                                     mean1: float, mean2: float,
                                     shared: bool = False) -> "SubordinatorSpec":
        """Exponential jump sizes, either independent or driven by one shared exponential"""
        if shared:
            def sampler(rng: np.random.Generator, size: int):
                e = rng.standard_exponential(size)
                return mean1 * e, mean2 * e
            cross = 2.0 * mean1 * mean2
        else:
            def sampler(rng: np.random.Generator, size: int):
                return rng.exponential(mean1, size), rng.exponential(mean2, size)
            cross = mean1 * mean2
        second = ((2.0 * mean1 ** 2, cross), (cross, 2.0 * mean2 ** 2))
        label = "compound_poisson_shared" if shared else "compound_poisson"
        return cls(drift1, drift2, jump_rate, sampler, (mean1, mean2), second, label)


@dataclass(frozen=True)
class LevyModelSpec:
    """Pre-limit model: input process and switching law"""
    sub: SubordinatorSpec
    sw: SwitchLaw


def switching_bm_variance(sw: SwitchLaw) -> float:
    """Diffusion constant of the centred switching integral int (I(u) - p1) du"""
    c1, c2 = sw.c1, sw.c2
    return (c1 * c2 * (c1 ** 2 * sw.var1 - 2.0 * c1 * c2 * sw.cov + c2 ** 2 * sw.var2)
            / (c1 + c2) ** 3)


def hat_drifts(theta: Tuple[float, float], lambdas: Tuple[float, float],
               p1: float, sigma: float) -> HTDrifts:
    """theta_hat_j = p_j theta_j / (lambda_j sigma)

    Raises:
        ValidationError: If sigma = 0 (constant visit-time ratio) or inputs are out of range
    """
    if sigma == 0:
        raise ValidationError("Hatted drifts are undefined for zero switching variance")
    Validators.positive("sigma", sigma)
    Validators.probability("p1", p1)
    p = (p1, 1.0 - p1)
    values = []
    for j in range(2):
        Validators.positive(f"theta{j + 1}", theta[j])
        Validators.positive(f"lambda{j + 1}", lambdas[j])
        values.append(p[j] * theta[j] / (lambdas[j] * sigma))
    return HTDrifts(theta1_hat=values[0], theta2_hat=values[1])


def fluid_hat_drift(mu: float, c: float) -> float:
    """Hatted drift 4c/mu under which the limit matches the symmetric fluid model"""
    return 4.0 * Validators.positive("c", c) / Validators.positive("mu", mu)


def levy_ht_kernel(d: HTDrifts, s1: Any, s2: Any) -> Any:
    """theta1 s1 + theta2 s2 + (s1 - s2)^2 / 2"""
    z1, z2 = as_complex(s1), as_complex(s2)
    value = d.theta1_hat * z1 + d.theta2_hat * z2 + 0.5 * (z1 - z2) ** 2
    return unwrap(value, s1 if np.ndim(s1) else s2)


def levy_kernel_roots(d: HTDrifts, s1: Any) -> Tuple[Any, Any]:
    """Roots in s2 of the kernel, ordered ("-" root, "+" root)"""
    z = as_complex(s1)
    root = np.sqrt(d.theta2_hat ** 2 - 2.0 * z * d.total)
    base = z - d.theta2_hat
    return unwrap(base - root, s1), unwrap(base + root, s1)


def levy_branch_point(d: HTDrifts) -> float:
    return d.theta2_hat ** 2 / (2.0 * d.total)


def levy_strip_bound(d: HTDrifts, j: int) -> float:
    """Vertex of the j-th parabola; f_j is analytic to its right"""
    own, other = d.theta(j), d.theta(3 - j)
    return -other * (2.0 * own + other) / (2.0 * d.total)


def levy_parabola(d: HTDrifts, j: int) -> ParabolaGeometry:
    """Parabola v^2 = 2T (u - vertex) bounding the domain of f_j"""
    return ParabolaGeometry(vertex_u=levy_strip_bound(d, j), opening=2.0 * d.total)


def levy_conformal(d: HTDrifts, j: int, z: Any) -> Any:
    """Conformal map of the j-th parabola interior onto the unit disc

    Raises:
        DomainError: If the denominator vanishes
    """
    total = d.total
    w = np.cosh(np.pi * np.sqrt(2.0 * total * as_complex(z) - d.theta(j) ** 2) / (2.0 * total))
    denominator = 1.0 + SQRT2 * w
    if np.any(np.abs(denominator) < 1e-300):
        raise DomainError("levy_conformal evaluated at a pole outside the parabola")
    return unwrap((1.0 - SQRT2 * w) / denominator, z)


def _f_hat(d: HTDrifts, j: int, z: np.ndarray) -> np.ndarray:
    total = d.total
    theta = d.theta(j)
    w = np.sqrt(theta ** 2 - 2.0 * total * z)
    prefactor = math.sin(math.pi * theta / total) * (w + theta) / (
        2.0 * np.sin(np.pi * (w + theta) / (2.0 * total)))
    return prefactor * u_over_sin(np.pi * (theta - w) / (2.0 * total))


def f_hat(d: HTDrifts, j: int, s: Any) -> Any:
    """Boundary function f_j of the joint functional equation, f_j(0) = theta_hat_j

    Args:
        d: Hatted drifts
        j: Index of the boundary function
        s: Argument(s) to the right of the j-th parabola vertex

    Raises:
        DomainError: If Re[s] is left of the strip bound
    """
    z = as_complex(s)
    if np.any(z.real <= levy_strip_bound(d, j)):
        raise DomainError(f"f_hat_{j} needs Re[s] > {levy_strip_bound(d, j):g}")
    return unwrap(_f_hat(d, j, z), s)


def f_hat_poles(d: HTDrifts, j: int, count: int = 10) -> Dict[str, np.ndarray]:
    """Denominator zeros of f_j

    Returns the two pole families (theta_j^2 - 4T^2 (3/4 + 2n)^2)/(2T) and
    (theta_j^2 - (4Tn - theta_j)^2)/(2T), n != 0, together with the full zero
    set (theta_j^2 - (2Tk +- theta_j)^2)/(2T) of the closed form, s = 0 excluded.
    """
    total = d.total
    theta = d.theta(j)
    n = np.arange(-count, count + 1)
    nonzero = n[n != 0]
    first = (theta ** 2 - 4.0 * total ** 2 * (0.75 + 2.0 * n) ** 2) / (2.0 * total)
    second = (theta ** 2 - (4.0 * total * nonzero - theta) ** 2) / (2.0 * total)
    shifts = np.concatenate([2.0 * total * n + theta, 2.0 * total * n - theta])
    shifts = shifts[np.abs(np.abs(shifts) - theta) > 1e-12 * total]
    full = (theta ** 2 - shifts ** 2) / (2.0 * total)
    return {"family_a": first, "family_b": second, "closed_form": np.unique(full)}


def _joint_raw(d: HTDrifts, z1: complex, z2: complex) -> complex:
    k = d.theta1_hat * z1 + d.theta2_hat * z2 + 0.5 * (z1 - z2) ** 2
    numerator = z1 * _f_hat(d, 1, np.asarray(z2)) + z2 * _f_hat(d, 2, np.asarray(z1))
    return complex(numerator / k)


def _joint_point(d: HTDrifts, z1: complex, z2: complex) -> complex:
    if z1 == 0 and z2 == 0:
        return 1.0 + 0j
    k = d.theta1_hat * z1 + d.theta2_hat * z2 + 0.5 * (z1 - z2) ** 2
    scale = d.total * (abs(z1) + abs(z2)) + 0.5 * abs(z1 - z2) ** 2
    if abs(k) > 1e-10 * scale:
        return _joint_raw(d, z1, z2)
    step = REMOVABLE_SHIFT * max(1.0, abs(z1) + abs(z2))
    return richardson_central(lambda h: _joint_raw(d, z1 + h, z2 + h), step)


def levy_joint_lst(d: HTDrifts, s1: Any, s2: Any) -> Any:
    """Joint LST of the scaled stationary workloads of the limit

    Raises:
        DomainError: If an argument lies outside its strip
    """
    z1, z2 = np.broadcast_arrays(as_complex(s1), as_complex(s2))
    if np.any(z2.real <= levy_strip_bound(d, 1)) or np.any(z1.real <= levy_strip_bound(d, 2)):
        raise DomainError("levy_joint_lst evaluated outside the strips")
    values = np.array([_joint_point(d, a, b) for a, b in zip(z1.reshape(-1), z2.reshape(-1))],
                      dtype=complex).reshape(z1.shape)
    return unwrap(values, s1 if np.ndim(s1) else s2)


def functional_equation_residual(d: HTDrifts, s1: Any, s2: Any) -> Any:
    """k nu - s1 f_1(s2) - s2 f_2(s1), zero by construction"""
    z1, z2 = np.broadcast_arrays(as_complex(s1), as_complex(s2))
    nu = as_complex(levy_joint_lst(d, z1, z2))
    residual = (as_complex(levy_ht_kernel(d, z1, z2)) * nu
                - z1 * _f_hat(d, 1, z2) - z2 * _f_hat(d, 2, z1))
    return unwrap(residual, s1 if np.ndim(s1) else s2)


@dataclass(frozen=True)
class VanishingRecord:
    """f_j along decreasing theta_hat_j at a fixed argument"""
    j: int
    s: float
    theta_other: float
    thetas: List[float]
    values: List[float]
    ratios: List[float]
    monotone: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def f_hat_vanishing_limit(theta_other: float, j: int, s: float = 1.0,
                          thetas: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)) -> VanishingRecord:
    """Evaluate f_j as theta_hat_j decreases to 0 with theta_hat_{3-j} fixed"""
    Validators.queue_index(j)
    values = []
    for theta in thetas:
        pair = (theta, theta_other) if j == 1 else (theta_other, theta)
        d = HTDrifts(theta1_hat=pair[0], theta2_hat=pair[1])
        values.append(abs(complex(f_hat(d, j, s))))
    tail = [v for t, v in zip(thetas, values) if t <= 1e-2]
    monotone = all(b < a for a, b in zip(tail, tail[1:]))
    return VanishingRecord(
        j=j, s=s, theta_other=theta_other, thetas=list(thetas), values=values,
        ratios=[v / t for v, t in zip(values, thetas)], monotone=monotone,
    )


@dataclass(frozen=True)
class LevyMoments:
    """Stationary moments of the scaled limit workloads"""
    mean1: float
    mean2: float
    second1: float
    second2: float
    cross: float
    correlation: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def levy_moments(d: HTDrifts, h: Optional[float] = None) -> LevyMoments:
    """Exponential marginal moments and the cross moment by numeric differentiation"""
    mean1, mean2 = 0.5 / d.theta1_hat, 0.5 / d.theta2_hat
    second1, second2 = 2.0 * mean1 ** 2, 2.0 * mean2 ** 2
    step = h if h is not None else 1e-2 * min(d.theta1_hat, d.theta2_hat)
    cross = mixed_partial(lambda a, b: complex(levy_joint_lst(d, a, b)), step).real
    correlation = (cross - mean1 * mean2) / math.sqrt((second1 - mean1 ** 2) * (second2 - mean2 ** 2))
    return LevyMoments(mean1, mean2, second1, second2, cross, correlation)


def limit_covariance(sub: SubordinatorSpec, sw: SwitchLaw) -> np.ndarray:
    """Covariance of the limiting free process: Sigma + sigma^2 v v^T, v = (lambda1/p1, -lambda2/p2)"""
    lam1, lam2 = sub.lambdas
    v = np.array([lam1 / sw.p1, -lam2 / sw.p2])
    return sub.covariance + switching_bm_variance(sw) * np.outer(v, v)


def service_rates_for_drifts(sub: SubordinatorSpec, sw: SwitchLaw,
                             theta: Tuple[float, float], n: float) -> Tuple[float, float]:
    """Service rates mu_j^n with sqrt(n)(p_j mu_j^n - lambda_j) = theta_j"""
    lam1, lam2 = sub.lambdas
    root = math.sqrt(Validators.positive("n", n))
    return (lam1 + theta[0] / root) / sw.p1, (lam2 + theta[1] / root) / sw.p2
