"""
Closed-form heavy-traffic objects of the symmetric model

All quantities refer to the workloads scaled by (1/2 - rho) as rho increases
to 1/2. The scaled total workload C has LST

    L(s) = (pi/4)(mu/c) s / cosh((pi/2) sqrt(mu s/c - 1))

which is evaluated as ((1 + w)/2) u/sin(u) with w = sqrt(1 - mu s/c) and
u = (pi/2)(1 - w). That form is branch-free, has no removable point at 0 and
is the meromorphic continuation used for numerical inversion.
"""

import math
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fluid_polling.core.inversion import LstEvaluator, talbot_pdf_grid
from fluid_polling.utils.numerics import as_complex, richardson_central, u_over_sin, unwrap
from fluid_polling.utils.validators import DomainError, Validators

SQRT2 = math.sqrt(2.0)

# Series density is used from this multiple of mu/c upwards
DENSITY_CROSSOVER = 0.05
REMOVABLE_SHIFT = 1e-7


class HTSymmetric(BaseModel):
    """Heavy-traffic regime of the symmetric model"""

    model_config = ConfigDict(frozen=True)

    mu: float = Field(gt=0, allow_inf_nan=False)
    c: float = Field(gt=0, allow_inf_nan=False)

    @classmethod
    def from_hat_drift(cls, theta_hat: float) -> "HTSymmetric":
        """Regime whose kernel matches the unit-variance reflected BM with drift theta_hat"""
        return cls(mu=1.0, c=Validators.positive("theta_hat", theta_hat) / 4.0)

    @property
    def g(self) -> float:
        return self.mu / self.c

    @property
    def strip(self) -> float:
        """Left edge -3c/mu of the analyticity strip"""
        return -3.0 * self.c / self.mu

    def a_n(self, n: Any) -> Any:
        """Poles -a_n of the total LST, a_n = (c/mu)((2n+1)^2 - 1)"""
        n = np.asarray(n, dtype=float)
        return (self.c / self.mu) * ((2.0 * n + 1.0) ** 2 - 1.0)


@dataclass(frozen=True)
class ParabolaGeometry:
    """Parabola v^2 = opening * (u - vertex_u)"""
    vertex_u: float
    opening: float

    def residual(self, u: Any, v: Any) -> Any:
        return np.asarray(v) ** 2 - self.opening * (np.asarray(u) - self.vertex_u)

    def boundary_points(self, count: int, extent: float) -> np.ndarray:
        """count points u + iv on the parabola with u - vertex_u in (0, extent], both signs of v"""
        t = np.linspace(0.0, extent, count // 2 + 1)[1:]
        v = np.sqrt(self.opening * t)
        u = self.vertex_u + t
        points = np.concatenate([u + 1j * v, u - 1j * v])
        return points[:count]


@dataclass(frozen=True)
class HTMoments:
    """Moments of the scaled stationary workloads"""
    mean_j: float
    second_j: float
    cross: float
    correlation: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def parabola_geometry(h: HTSymmetric) -> ParabolaGeometry:
    return ParabolaGeometry(vertex_u=-3.0 * h.c / h.mu, opening=16.0 * h.c / h.mu)


def ht_kernel(h: HTSymmetric, s1: Any, s2: Any) -> Any:
    """s1 + s2 + (mu/8c)(s1 - s2)^2"""
    z1, z2 = as_complex(s1), as_complex(s2)
    return unwrap(z1 + z2 + h.g / 8.0 * (z1 - z2) ** 2, s1 if np.ndim(s1) else s2)


def ht_kernel_roots(h: HTSymmetric, s1: Any) -> Tuple[Any, Any]:
    """Roots in s2 of ht_kernel, ordered ("-" root, "+" root)"""
    z = as_complex(s1)
    k = h.g / 4.0
    root = np.sqrt(1.0 - h.g * z)
    return unwrap((-1.0 + k * z - root) / k, s1), unwrap((-1.0 + k * z + root) / k, s1)


def conformal_psi(h: HTSymmetric, z: Any) -> Any:
    """Conformal map of the parabola interior onto the unit disc, psi(0) = 0

    Raises:
        DomainError: If the denominator vanishes (outside the parabola)
    """
    w = np.cosh(np.pi / 4.0 * np.sqrt(h.g * as_complex(z) - 1.0))
    denominator = 1.0 + SQRT2 * w
    if np.any(np.abs(denominator) < 1e-300):
        raise DomainError("conformal_psi evaluated at a pole outside the parabola")
    return unwrap((1.0 - SQRT2 * w) / denominator, z)


def _total_lst(h: HTSymmetric, z: np.ndarray) -> np.ndarray:
    w = np.sqrt(1.0 - h.g * z)
    return 0.5 * (1.0 + w) * u_over_sin(0.5 * np.pi * (1.0 - w))


def _check_strip(h: HTSymmetric, *points: np.ndarray) -> None:
    for z in points:
        if np.any(z.real <= h.strip):
            raise DomainError(f"Re[s] must exceed {h.strip:g}")


def ht_total_lst(h: HTSymmetric, s: Any) -> Any:
    """LST of the scaled total workload

    Args:
        h: Heavy-traffic parameters
        s: Argument(s) with Re[s] > -3c/mu

    Returns:
        L(s)

    Raises:
        DomainError: If Re[s] <= -3c/mu
    """
    z = as_complex(s)
    _check_strip(h, z)
    return unwrap(_total_lst(h, z), s)


def total_lst_evaluator(h: HTSymmetric) -> LstEvaluator:
    """Evaluator of the continued total LST for numerical inversion"""
    return LstEvaluator(func=lambda z: _total_lst(h, z), abscissa=h.strip, name="ht_total")


def ht_total_pole(h: HTSymmetric, n: Any) -> Any:
    """Poles (c/mu)(1 - (2n+1)^2) of the total LST"""
    return -h.a_n(n)


def ht_total_lst_product(h: HTSymmetric, s: Any, n_terms: int,
                         tail_correction: bool = False) -> Any:
    """Truncated product prod_{n<=N} a_n/(s + a_n)

    With tail_correction the omitted factors are replaced by exp(-s sum_{n>N} 1/a_n),
    where the tail sum telescopes to (mu/4c)/(N+1).

    Raises:
        DomainError: If s hits a pole -a_n
    """
    Validators.integer_at_least("n_terms", n_terms, 1)
    z = as_complex(s)
    a = h.a_n(np.arange(1, n_terms + 1))
    flat = z.reshape(-1)
    if np.any(np.isin(flat, -a)):
        raise DomainError("Product evaluated at a pole")
    log_terms = np.log1p(flat[:, None] / a[None, :]).sum(axis=1)
    if tail_correction:
        log_terms = log_terms + flat * (h.g / 4.0) / (n_terms + 1)
    return unwrap(np.exp(-log_terms).reshape(z.shape), s)


def sampler_bias_bound(h: HTSymmetric, n_terms: int) -> float:
    """sum_{n>N} 1/a_n, the mean of the omitted part of the series"""
    return (h.g / 4.0) / (n_terms + 1)


def ht_total_sampler(h: HTSymmetric, rng: np.random.Generator, n_terms: int,
                     size: Optional[int] = None, tail_correction: bool = False) -> Any:
    """Draws of sum_{n<=N} E_n/a_n with i.i.d. unit exponentials

    Args:
        h: Heavy-traffic parameters
        rng: Caller-owned generator
        n_terms: Number of series terms N
        size: Number of draws; None returns a float
        tail_correction: Add the mean of the omitted terms

    Returns:
        A float or an ndarray of draws
    """
    Validators.integer_at_least("n_terms", n_terms, 1)
    shape = 1 if size is None else size
    total = np.zeros(shape)
    for a in h.a_n(np.arange(1, n_terms + 1)):
        total += rng.standard_exponential(shape) / a
    if tail_correction:
        total += sampler_bias_bound(h, n_terms)
    return float(total[0]) if size is None else total


def _series_density(h: HTSymmetric, x: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    n = 1
    while active.any():
        a = float(h.a_n(n))
        term = (-1.0) ** (n + 1) * (2 * n + 1) * a * np.exp(-a * x)
        total = np.where(active, total + term, total)
        done = np.abs(term) < 1e-14 * (np.abs(total) + 1e-30)
        active &= ~(done & (n >= 2))
        n += 1
    return total


def ht_total_density(h: HTSymmetric, x: Any, m: Optional[int] = None) -> Any:
    """Density of the scaled total workload

    Uses the alternating exponential series for x >= 0.05 mu/c and Talbot
    inversion of the total LST below.

    Raises:
        DomainError: If x <= 0
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise DomainError("Density needs x > 0")
    out = np.empty_like(xs)
    small = xs < DENSITY_CROSSOVER * h.g
    if (~small).any():
        out[~small] = _series_density(h, xs[~small])
    if small.any():
        out[small] = talbot_pdf_grid(total_lst_evaluator(h), xs[small], m)
    return float(out[0]) if np.ndim(x) == 0 else out


def ht_marginal_lst(h: HTSymmetric, s: Any) -> Any:
    """Exponential LST 1/(1 + mu s/(8c)) of one scaled workload"""
    z = as_complex(s)
    return unwrap(1.0 / (1.0 + h.g / 8.0 * z), s)


def _joint_raw(h: HTSymmetric, z1: complex, z2: complex) -> complex:
    k = z1 + z2 + h.g / 8.0 * (z1 - z2) ** 2
    numerator = z2 * _total_lst(h, np.asarray(z1)) + z1 * _total_lst(h, np.asarray(z2))
    return complex(numerator / k)


def _joint_point(h: HTSymmetric, z1: complex, z2: complex) -> complex:
    if z1 == 0 and z2 == 0:
        return 1.0 + 0j
    k = z1 + z2 + h.g / 8.0 * (z1 - z2) ** 2
    scale = abs(z1) + abs(z2) + h.g / 8.0 * abs(z1 - z2) ** 2
    if abs(k) > 1e-10 * scale:
        return _joint_raw(h, z1, z2)
    step = REMOVABLE_SHIFT * max(1.0, abs(z1) + abs(z2))
    return richardson_central(lambda d: _joint_raw(h, z1 + d, z2 + d), step)


def ht_joint_lst(h: HTSymmetric, s1: Any, s2: Any) -> Any:
    """Joint LST of the two scaled workloads

    nu(s1, s2) = [s2 L(s1) + s1 L(s2)] / k(s1, s2); removable points at kernel
    zeros are evaluated by a symmetric shift with one Richardson step.

    Raises:
        DomainError: If Re[s_j] <= -3c/mu
    """
    z1, z2 = np.broadcast_arrays(as_complex(s1), as_complex(s2))
    _check_strip(h, z1, z2)
    values = np.array([_joint_point(h, a, b) for a, b in zip(z1.reshape(-1), z2.reshape(-1))],
                      dtype=complex).reshape(z1.shape)
    return unwrap(values, s1 if np.ndim(s1) else s2)


def ht_variance_total(h: HTSymmetric) -> float:
    return (h.g / 4.0) ** 2 * (math.pi ** 2 - 9.0) / 3.0


def ht_moments(h: HTSymmetric) -> HTMoments:
    """Means, second moments, cross moment and correlation of the scaled workloads"""
    g = h.g
    second = g * g / 32.0
    mean = g / 8.0
    cross = second * (math.pi ** 2 - 9.0) / 3.0
    return HTMoments(
        mean_j=mean,
        second_j=second,
        cross=cross,
        correlation=2.0 * math.pi ** 2 / 3.0 - 7.0,
    )


def biane_density_C(x: Any) -> Any:
    """Density of the law with LST 1/cosh(sqrt(2s))

    Series in exp(-(n-1/2)^2 pi^2 x/2) for x >= 4/pi^2, the reciprocal
    series in exp(-(2n-1)^2/(2x)) below.

    Raises:
        DomainError: If x <= 0
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0):
        raise DomainError("Density needs x > 0")
    crossover = 4.0 / math.pi ** 2
    out = np.empty_like(xs)
    large = xs >= crossover
    if large.any():
        out[large] = _alternating(lambda n, v: math.pi * (n - 0.5)
                                  * np.exp(-(n - 0.5) ** 2 * math.pi ** 2 * v / 2.0), xs[large])
    if (~large).any():
        v = xs[~large]
        out[~large] = np.sqrt(2.0 / (math.pi * v ** 3)) * _alternating(
            lambda n, t: (2 * n - 1) * np.exp(-(2 * n - 1) ** 2 / (2.0 * t)), v)
    return float(out[0]) if np.ndim(x) == 0 else out


def _alternating(term, x: np.ndarray, max_terms: int = 200) -> np.ndarray:
    total = np.zeros_like(x)
    for n in range(1, max_terms + 1):
        value = (-1.0) ** (n + 1) * term(n, x)
        total += value
        if n >= 2 and np.all(np.abs(value) < 1e-16 * (np.abs(total) + 1e-300)):
            break
    return total
