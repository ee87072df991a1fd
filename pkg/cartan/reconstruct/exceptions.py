from typing import List, Optional

import numpy as np


class ReconstructionException(ValueError):
    pass


class InvalidProblem(ReconstructionException):
    pass


class NotOnSubmanifold(ReconstructionException):
    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


class PathExitsDomain(ReconstructionException):
    pass


class NewtonNotConverged(ReconstructionException):
    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AmbiguousNormalGeodesic(ReconstructionException):
    """
    Several normal geodesics from S reach the same point
    """

    def __init__(self, message: str, solutions: Optional[List[np.ndarray]] = None):
        super().__init__(message)
        self.solutions = solutions or []


class InvalidPath(ReconstructionException):
    pass
