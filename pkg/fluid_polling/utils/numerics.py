"""
Small complex-arithmetic helpers shared by the transform modules
"""

from typing import Any, Callable, Tuple

import numpy as np

# |Im u| beyond which sin(u) overflows double precision; u/sin(u) is then ~0
_SIN_OVERFLOW = 700.0


def as_complex(s: Any) -> np.ndarray:
    """Convert a scalar or array-like to a complex ndarray"""
    return np.asarray(s, dtype=complex)


def unwrap(value: np.ndarray, like: Any) -> Any:
    """Return a Python scalar when the input was a scalar"""
    if np.ndim(like) == 0:
        return complex(np.asarray(value).reshape(()))
    return value


def u_over_sin(u: np.ndarray) -> np.ndarray:
    """Evaluate u/sin(u) for complex u without the removable 0/0 at u = 0"""
    u = as_complex(u)
    out = np.zeros_like(u)
    finite = np.abs(u.imag) < _SIN_OVERFLOW
    out[finite] = 1.0 / np.sinc(u[finite] / np.pi)
    return out


def richardson_central(func: Callable[[float], complex], h: float) -> complex:
    """Symmetric shift average with one Richardson step

    Approximates the limit of func at 0 from func(+h), func(-h), func(+h/2), func(-h/2).
    """
    coarse = 0.5 * (func(h) + func(-h))
    fine = 0.5 * (func(h / 2) + func(-h / 2))
    return (4.0 * fine - coarse) / 3.0


def mixed_partial(func: Callable[[complex, complex], complex], h: float,
                  at: Tuple[complex, complex] = (0.0, 0.0)) -> complex:
    """Central-difference d^2 f / ds1 ds2 with one Richardson step"""
    x, y = at

    def central(step: float) -> complex:
        return (func(x + step, y + step) - func(x + step, y - step)
                - func(x - step, y + step) + func(x - step, y - step)) / (4.0 * step * step)

    return (4.0 * central(h / 2) - central(h)) / 3.0


def partial(func: Callable[[complex, complex], complex], index: int, h: float,
            at: Tuple[complex, complex] = (0.0, 0.0)) -> complex:
    """Central-difference first partial derivative with one Richardson step"""
    x, y = at

    def central(step: float) -> complex:
        if index == 1:
            return (func(x + step, y) - func(x - step, y)) / (2.0 * step)
        return (func(x, y + step) - func(x, y - step)) / (2.0 * step)

    return (4.0 * central(h / 2) - central(h)) / 3.0
