import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict

from ..constants import (
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    DEFAULT_REORTHO_EVERY,
    DEFAULT_REORTHO_TAU,
    DEFAULT_STEPS_PER_UNIT,
)
from .exceptions import InvalidIntegratorConfig


class IntegrationMethod(Enum):
    RK4 = "rk4"
    RK45 = "rk45"


class ReorthoPolicy(Enum):
    NEVER = "never"
    EVERY = "every"
    DRIFT = "drift"


@dataclass(frozen=True)
class IntegratorConfig:
    """
    :param steps: fixed RK4 steps per unit of parameter
    :param reortho_every: period in steps of the re-orthonormalization policy
    :param tau: drift threshold of the ``drift`` policy
    """

    method: IntegrationMethod = IntegrationMethod.RK4
    steps: int = DEFAULT_STEPS_PER_UNIT
    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    reortho_policy: ReorthoPolicy = ReorthoPolicy.DRIFT
    reortho_every: int = DEFAULT_REORTHO_EVERY
    tau: float = DEFAULT_REORTHO_TAU

    def __post_init__(self):
        if not isinstance(self.steps, int) or self.steps < 1:
            raise InvalidIntegratorConfig(f"steps must be an integer >= 1, got {self.steps}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidIntegratorConfig("Tolerances must be positive")
        if not self.tau > 0:
            raise InvalidIntegratorConfig(f"tau must be positive, got {self.tau}")
        if not isinstance(self.reortho_every, int) or self.reortho_every < 1:
            raise InvalidIntegratorConfig(
                f"reortho_every must be an integer >= 1, got {self.reortho_every}"
            )

    def step_count(self, span: float) -> int:
        """
        :return: number of fixed steps needed to cover ``span``
        """
        return max(1, math.ceil(self.steps * abs(span) - 1e-9))

    def with_steps(self, steps: int) -> "IntegratorConfig":
        return replace(self, steps=steps)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IntegratorConfig":
        """
        :param data: ``{"method": "rk4", "steps": 1000, "rel_tol": .., "abs_tol": ..,
            "reortho": {"policy": "drift", "tau": 1e-9, "every": 16}}``
        """
        try:
            reortho = data.get("reortho", {})
            return cls(
                method=IntegrationMethod(data.get("method", cls.method.value)),
                steps=data.get("steps", cls.steps),
                rel_tol=float(data.get("rel_tol", cls.rel_tol)),
                abs_tol=float(data.get("abs_tol", cls.abs_tol)),
                reortho_policy=ReorthoPolicy(
                    reortho.get("policy", cls.reortho_policy.value)
                ),
                reortho_every=reortho.get("every", cls.reortho_every),
                tau=float(reortho.get("tau", cls.tau)),
            )
        except (AttributeError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidIntegratorConfig):
                raise
            raise InvalidIntegratorConfig(f"Invalid integrator config {data}") from exc

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "steps": self.steps,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "reortho": {
                "policy": self.reortho_policy.value,
                "tau": self.tau,
                "every": self.reortho_every,
            },
        }
