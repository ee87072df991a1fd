class VariationException(ValueError):
    pass


class InvalidHomotopy(VariationException):
    pass


class FrameNotParallel(VariationException):
    """
    Initial frames of a family are not orthonormal or not parallel along the base curve
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class GridMismatch(VariationException):
    pass
