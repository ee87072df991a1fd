# flake8: noqa F401
from .adapted import (
    AdaptedTransport,
    bundle_transport,
    direct_sum_transport,
    h_components,
    pullback_h_profile,
    transport_along_submanifold,
)
from .curves import CurvePath, HProfile, VelocityProfile
from .develop import (
    Development,
    anti_develop,
    check_orthonormal,
    develop,
    development_residual,
    generalized_develop,
    generalized_transport,
    parallel_transport,
    standard_frame,
    transport_frames,
)
from .exceptions import (
    CurveOutsideDomain,
    DegenerateGrid,
    DevelopmentNotExisting,
    InvalidProfile,
    NonOrthonormalFrame,
    ParameterOutsideGrid,
    TransportException,
)
