"""
Numerical Laplace inversion with the fixed Talbot contour, and ECDF comparison
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple

import numpy as np
from scipy import stats

from fluid_polling.utils.config import Config
from fluid_polling.utils.logger import get_logger
from fluid_polling.utils.validators import DomainError, ValidationError, Validators

logger = get_logger(__name__)

MONOTONE_TOLERANCE = 1e-6


@dataclass
class LstEvaluator:
    """A vectorised transform s -> F(s) with its abscissa of analyticity

    Args:
        func: Callable accepting complex ndarrays
        abscissa: F is analytic for Re[s] > abscissa
        probability: Whether F is the LST of a probability law (F(0) = 1)
        name: Label used in logs and exports
    """
    func: Callable[[np.ndarray], np.ndarray]
    abscissa: float = 0.0
    probability: bool = True
    name: str = "lst"

    def __post_init__(self) -> None:
        if self.probability:
            at_zero = complex(np.asarray(self.func(np.zeros(1, dtype=complex))).reshape(-1)[0])
            if abs(at_zero - 1.0) > 1e-10:
                raise ValidationError(f"{self.name}: LST must equal 1 at s = 0, got {at_zero}")

    def __call__(self, s: Any) -> np.ndarray:
        return np.asarray(self.func(np.asarray(s, dtype=complex)), dtype=complex)


# Cotangent Talbot contour z(t) = (m/x)(sigma + beta t cot(alpha t) + i nu t), -pi < t < pi
_SIGMA, _BETA, _ALPHA, _NU = -0.6122, 0.5017, 0.6407, 0.2645


def _talbot_nodes(x: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes z_k(x) and weights w_k(x) of the m-point midpoint rule on the contour, shape (len(x), m)

    The inverse at x is Re sum_k w_k F(z_k). Max |exp(x z)| on the contour is exp(0.171 m).
    """
    theta = -np.pi + (np.arange(m) + 0.5) * 2.0 * np.pi / m
    at_zero = theta == 0.0
    a = np.where(at_zero, 1.0, _ALPHA * theta)
    theta_cot = np.where(at_zero, 1.0 / _ALPHA, theta / np.tan(a))
    cot_slope = np.where(at_zero, 0.0, 1.0 / np.tan(a) - a / np.sin(a) ** 2)
    scale = m / x[:, None]
    nodes = scale * (_SIGMA + _BETA * theta_cot + 1j * _NU * theta)
    weights = np.exp(x[:, None] * nodes) * (_BETA * cot_slope + 1j * _NU) / (1j * x[:, None])
    return nodes, weights


def _talbot(f: Callable[[np.ndarray], np.ndarray], x: Any, m: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise DomainError("Talbot inversion needs x > 0")
    Validators.integer_at_least("m", m, 8)
    nodes, weights = _talbot_nodes(x, m)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        terms = (weights * f(nodes)).real
    terms = np.where(np.isfinite(terms), terms, 0.0)
    return np.array([math.fsum(row) for row in terms])


def talbot_invert_pdf(f: LstEvaluator, x: float, m: Optional[int] = None) -> float:
    """Density at x of the law with LST f

    Args:
        f: Transform evaluator
        x: Point, x > 0
        m: Number of Talbot nodes (default from Config)

    Returns:
        The inverted value

    Raises:
        DomainError: If x <= 0
    """
    return float(_talbot(f, x, m or Config.TALBOT_NODES)[0])


def talbot_pdf_grid(f: LstEvaluator, xs: Any, m: Optional[int] = None) -> np.ndarray:
    return _talbot(f, xs, m or Config.TALBOT_NODES)


def talbot_cdf_grid(f: LstEvaluator, xs: Any, m: Optional[int] = None) -> np.ndarray:
    """CDF values on a grid, clamped to [0, 1]

    A decrease larger than MONOTONE_TOLERANCE along increasing x is logged as a warning.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    values = _talbot(lambda s: f(s) / s, xs, m or Config.TALBOT_NODES)
    values = np.clip(values, 0.0, 1.0)
    order = np.argsort(xs)
    drops = -np.diff(values[order])
    if drops.size and drops.max() > MONOTONE_TOLERANCE:
        logger.warning("%s: inverted CDF decreases by %.3g on the grid", f.name, drops.max())
    return values


def talbot_invert_cdf(f: LstEvaluator, x: float, m: Optional[int] = None) -> float:
    """Distribution function at x of the law with LST f (inverts f(s)/s)"""
    return float(talbot_cdf_grid(f, [x], m)[0])


def tabulated_cdf(f: LstEvaluator, upper: float, points: int = 2001,
                  m: Optional[int] = None) -> Callable[[np.ndarray], np.ndarray]:
    """Monotone piecewise-linear CDF interpolated from Talbot values on (0, upper]"""
    xs = np.linspace(0.0, upper, points)[1:]
    values = np.maximum.accumulate(talbot_cdf_grid(f, xs, m))
    grid_x = np.concatenate([[0.0], xs])
    grid_y = np.concatenate([[0.0], values])

    def cdf(x: Any) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), grid_x, grid_y, left=0.0, right=1.0)

    return cdf


@dataclass
class Ecdf:
    """Empirical distribution function of a sample"""
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.sort(np.asarray(self.values, dtype=float))

    @classmethod
    def from_samples(cls, samples: Any) -> "Ecdf":
        return cls(values=np.asarray(samples, dtype=float))

    @property
    def size(self) -> int:
        return int(self.values.size)

    def evaluate(self, x: Any) -> np.ndarray:
        """Fraction of samples <= x (right-continuous)"""
        if self.size == 0:
            raise ValidationError("Empty ECDF")
        return np.searchsorted(self.values, np.asarray(x, dtype=float), side="right") / self.size

    def curve(self, max_points: int = 2000) -> List[Tuple[float, float]]:
        """(value, cumulative probability) pairs, thinned to at most max_points rows"""
        if self.size == 0:
            return []
        step = max(1, self.size // max_points)
        idx = np.arange(step - 1, self.size, step)
        if idx[-1] != self.size - 1:
            idx = np.append(idx, self.size - 1)
        return [(float(self.values[i]), (i + 1) / self.size) for i in idx]


def ks_distance(e: Ecdf, model_cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov distance between an ECDF and a model CDF

    Raises:
        ValidationError: If the ECDF is empty
    """
    if e.size == 0:
        raise ValidationError("KS distance of an empty ECDF")
    return float(stats.kstest(e.values, model_cdf).statistic)
