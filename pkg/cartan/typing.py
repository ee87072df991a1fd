from typing import Dict, List, Optional, Union

try:
    from typing import TypedDict  # pylint: disable=no-name-in-module
except ImportError:
    from typing_extensions import TypedDict


class WorstLocationDict(TypedDict):
    curve_id: Optional[int]
    indices: List[int]


class HypothesisReportDict(TypedDict):
    condition: str
    curves_sampled: int
    max_residual: float
    tolerance: float
    passed: bool
    seed: int
    scale: float
    worst_location: Optional[WorstLocationDict]
    details: Dict[str, float]
    failures: List[Dict[str, Union[int, str, float, None]]]


class DriftReportDict(TypedDict):
    drift: float
    tolerance: float
    passed: bool
    u_values: List[float]
    endpoints: List[List[float]]


class ReconstructionDict(TypedDict):
    point: List[float]
    f_point: List[float]
    tau_matrix: List[List[float]]
    diagnostics: Dict[str, float]
