from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..typing import HypothesisReportDict


class Condition(Enum):
    CURVATURE = "curvature"
    GAUSS = "gauss"
    CODAZZI = "codazzi"
    RICCI = "ricci"
    MAPS = "maps"

    @classmethod
    def parse(cls, value: str) -> List["Condition"]:
        """
        :param value: comma separated names, e.g. ``gauss,codazzi,ricci``
        """
        return [cls(name.strip()) for name in value.split(",") if name.strip()]


@dataclass(frozen=True)
class CurveFailure:
    curve_id: int
    error: str
    message: str
    exit_time: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve_id": self.curve_id,
            "error": self.error,
            "message": self.message,
            "exit_time": self.exit_time,
        }


@dataclass(frozen=True)
class HypothesisReport:
    """
    Outcome of one hypothesis check. ``tolerance`` is the effective tolerance, already
    scaled by the largest curvature component met (``scale``).
    """

    condition: Condition
    curves_sampled: int
    max_residual: float
    tolerance: float
    seed: int = 0
    scale: float = 1.0
    worst_curve: Optional[int] = None
    worst_indices: Tuple[int, ...] = ()
    details: Dict[str, float] = field(default_factory=dict)
    failures: Tuple[CurveFailure, ...] = ()

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def to_dict(self) -> HypothesisReportDict:
        worst = None
        if self.worst_indices or self.worst_curve is not None:
            worst = {"curve_id": self.worst_curve, "indices": list(self.worst_indices)}
        return {
            "condition": self.condition.value,
            "curves_sampled": self.curves_sampled,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
            "scale": self.scale,
            "worst_location": worst,
            "details": dict(self.details),
            "failures": [failure.to_dict() for failure in self.failures],
        }
