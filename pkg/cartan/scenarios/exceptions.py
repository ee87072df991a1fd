from typing import Optional


class ScenarioException(ValueError):
    pass


class UnknownScenario(ScenarioException):
    pass


class OracleDomainError(ScenarioException):
    """
    Closed form requested outside the range where it holds. ``t`` is the last
    parameter an integrated oracle reached inside the chart, when there is one.
    """

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message)
        self.t = t
