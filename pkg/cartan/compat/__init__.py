# flake8: noqa F401
from .checks import (
    EndpointData,
    check_bundle_maps,
    check_codazzi,
    check_gauss,
    check_isometry_curvature,
    check_ricci,
    codazzi_residual,
    default_conditions,
    gauss_residual,
    ricci_residual,
    run_checks,
)
from .exceptions import CompatException, ConditionNotApplicable, NoUsableCurve
from .report import Condition, CurveFailure, HypothesisReport
from .sampling import index_tuples, sample_curves
