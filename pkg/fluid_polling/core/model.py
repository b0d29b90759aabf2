"""
Model parameters, stability and the workload recursion at switch epochs
"""

from dataclasses import dataclass
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from fluid_polling.utils.validators import ValidationError, Validators


class AsymmetricParams(BaseModel):
    """Rates of the two-queue model: input lambda_j, service mu_j, switch-out c_j"""

    model_config = ConfigDict(frozen=True)

    lambda1: float = Field(ge=0, allow_inf_nan=False)
    lambda2: float = Field(ge=0, allow_inf_nan=False)
    mu1: float = Field(gt=0, allow_inf_nan=False)
    mu2: float = Field(gt=0, allow_inf_nan=False)
    c1: float = Field(gt=0, allow_inf_nan=False)
    c2: float = Field(gt=0, allow_inf_nan=False)

    @property
    def rho1(self) -> float:
        return self.lambda1 / self.mu1

    @property
    def rho2(self) -> float:
        return self.lambda2 / self.mu2

    def rates(self, j: int) -> Tuple[float, float, float, float]:
        """Return (lambda_j, mu_j, c_j, c_{3-j}) for queue j"""
        Validators.queue_index(j)
        if j == 1:
            return self.lambda1, self.mu1, self.c1, self.c2
        return self.lambda2, self.mu2, self.c2, self.c1

    def swapped(self) -> "AsymmetricParams":
        """Relabel the queues"""
        return AsymmetricParams(
            lambda1=self.lambda2, lambda2=self.lambda1,
            mu1=self.mu2, mu2=self.mu1,
            c1=self.c2, c2=self.c1,
        )


class SymmetricParams(BaseModel):
    """Symmetric model: equal rates at both queues"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(gt=0, allow_inf_nan=False, alias="lambda")
    mu: float = Field(gt=0, allow_inf_nan=False)
    c: float = Field(gt=0, allow_inf_nan=False)

    @classmethod
    def from_rho(cls, rho: float, mu: float, c: float) -> "SymmetricParams":
        return cls(**{"lambda": rho * mu, "mu": mu, "c": c})

    @property
    def rho(self) -> float:
        return self.lam / self.mu

    @property
    def stable(self) -> bool:
        return self.rho < 0.5

    def to_asymmetric(self) -> AsymmetricParams:
        return AsymmetricParams(
            lambda1=self.lam, lambda2=self.lam,
            mu1=self.mu, mu2=self.mu,
            c1=self.c, c2=self.c,
        )


@dataclass
class WorkloadState:
    """Workloads, server position and clock"""
    v1: float
    v2: float
    serving: int
    clock: float = 0.0

    def __post_init__(self) -> None:
        Validators.nonnegative("v1", self.v1)
        Validators.nonnegative("v2", self.v2)
        Validators.nonnegative("clock", self.clock)
        Validators.queue_index(self.serving)


def stability_margins(p: AsymmetricParams) -> Tuple[float, float]:
    """Stability margins m_j = c_{3-j}/(c1+c2) - rho_j

    Args:
        p: Model parameters

    Returns:
        (m1, m2); the system is stable iff both are strictly positive
    """
    total = p.c1 + p.c2
    return p.c2 / total - p.rho1, p.c1 / total - p.rho2


def is_stable(p: AsymmetricParams) -> bool:
    m1, m2 = stability_margins(p)
    return m1 > 0 and m2 > 0


def total_workload_scale(p: AsymmetricParams) -> float:
    """Heavy-traffic scaling factor for the total workload

    Equals 1/2 - rho for symmetric parameters.
    """
    m1, m2 = stability_margins(p)
    return 0.5 * (m1 + m2)


def switch_epoch_update(v1: float, v2: float, t1: float, t2: float,
                        p: AsymmetricParams) -> Tuple[float, float]:
    """Advance the workloads over one cycle that starts with the server at queue 1

    Args:
        v1: Workload at queue 1 at the start of the cycle
        v2: Workload at queue 2 at the start of the cycle
        t1: Visit time at queue 1
        t2: Visit time at queue 2
        p: Model parameters

    Returns:
        Workloads at the end of the cycle

    Raises:
        ValidationError: If any input is negative
    """
    for name, value in (("v1", v1), ("v2", v2), ("t1", t1), ("t2", t2)):
        if Validators.finite(name, value) < 0:
            raise ValidationError(f"{name} must be nonnegative, got {value}")

    v1 = max(0.0, v1 + (p.lambda1 - p.mu1) * t1)
    v2 = v2 + p.lambda2 * t1
    v2 = max(0.0, v2 + (p.lambda2 - p.mu2) * t2)
    v1 = v1 + p.lambda1 * t2
    return v1, v2
