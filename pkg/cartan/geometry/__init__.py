# flake8: noqa F401
from .bundle import BundleData, FrameSplit, direct_sum_connection, shape_operator
from .exceptions import (
    DimensionMismatch,
    GeometryException,
    MetricNotPositiveDefinite,
    NotInFiber,
    NotTangentToSubmanifold,
    OutOfChartDomain,
    RankDeficientEmbedding,
)
from .metric import (
    ChartBox,
    DerivativeMode,
    MetricField,
    christoffel,
    frame_components,
    riemann,
    sectional_curvature,
)
from .submanifold import SubmanifoldSpec, normal_connection, second_fundamental_form
