class TransportException(ValueError):
    pass


class DevelopmentNotExisting(TransportException):
    """
    The development left the chart before ``t = 1``
    """

    def __init__(self, message: str, exit_time: float):
        super().__init__(message)
        self.exit_time = exit_time


class CurveOutsideDomain(TransportException):
    pass


class NonOrthonormalFrame(TransportException):
    pass


class DegenerateGrid(TransportException):
    pass


class ParameterOutsideGrid(TransportException):
    pass


class InvalidProfile(TransportException):
    pass
