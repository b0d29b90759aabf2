"""
Input validation utilities for Fluid Polling
"""

import math
from typing import Union, Sequence

Number = Union[int, float]


class ValidationError(Exception):
    """Custom validation error"""
    pass


class DomainError(ValidationError):
    """Evaluation point outside the contract domain of an operation"""
    pass


class UnstableSystemError(ValidationError):
    """Stationary quantity requested for unstable parameters"""
    pass


class Validators:
    """Input validation utilities"""

    @classmethod
    def finite(cls, name: str, value: Number) -> float:
        """Validate that a value is a finite real number"""
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a number, got {value!r}")
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value}")
        return value

    @classmethod
    def positive(cls, name: str, value: Number) -> float:
        """Validate a strictly positive value"""
        value = cls.finite(name, value)
        if value <= 0:
            raise ValidationError(f"{name} must be positive, got {value}")
        return value

    @classmethod
    def nonnegative(cls, name: str, value: Number) -> float:
        """Validate a nonnegative value"""
        value = cls.finite(name, value)
        if value < 0:
            raise ValidationError(f"{name} must be nonnegative, got {value}")
        return value

    @classmethod
    def probability(cls, name: str, value: Number, open_interval: bool = True) -> float:
        """Validate a probability, by default in the open interval (0, 1)"""
        value = cls.finite(name, value)
        if open_interval and not 0 < value < 1:
            raise ValidationError(f"{name} must lie in (0, 1), got {value}")
        if not open_interval and not 0 <= value <= 1:
            raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        return value

    @classmethod
    def queue_index(cls, j: int) -> int:
        """Validate a queue index"""
        if j not in (1, 2):
            raise ValidationError(f"Queue index must be 1 or 2, got {j!r}")
        return j

    @classmethod
    def min_count(cls, name: str, values: Sequence, minimum: int) -> int:
        """Validate that a sequence holds at least `minimum` entries"""
        count = len(values)
        if count < minimum:
            raise ValidationError(f"{name} needs at least {minimum} entries, got {count}")
        return count

    @classmethod
    def integer_at_least(cls, name: str, value: int, minimum: int) -> int:
        """Validate an integer lower bound"""
        if int(value) != value or value < minimum:
            raise ValidationError(f"{name} must be an integer >= {minimum}, got {value!r}")
        return int(value)
