# flake8: noqa F401
from .exceptions import (
    FrameNotParallel,
    GridMismatch,
    InvalidHomotopy,
    VariationException,
)
from .family import FamilyInput, Homotopy, TargetLift, transport_base_frames
from .finite_difference import (
    FiniteDifferenceVariation,
    finite_difference_generalized_variation,
    finite_difference_variation,
)
from .solvers import (
    CurvatureOverride,
    ReductionReport,
    VariationStage,
    VariationState,
    VariationTrajectory,
    reduction_check,
    solve_variation_immersion,
    solve_variation_isometry,
)
