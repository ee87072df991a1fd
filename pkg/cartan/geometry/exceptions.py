from typing import Optional

import numpy as np


class GeometryException(ValueError):
    pass


class OutOfChartDomain(GeometryException):
    def __init__(self, message: str, point: Optional[np.ndarray] = None):
        super().__init__(message)
        self.point = point


class MetricNotPositiveDefinite(GeometryException):
    pass


class RankDeficientEmbedding(GeometryException):
    pass


class NotTangentToSubmanifold(GeometryException):
    pass


class NotInFiber(GeometryException):
    pass


class DimensionMismatch(GeometryException):
    pass
