from typing import Optional

import numpy as np


class IntegrationException(ValueError):
    pass


class InvalidIntegratorConfig(IntegrationException):
    pass


class DomainExit(IntegrationException):
    """
    The state left the chart domain. ``t`` is the last parameter reached inside the
    domain, ``times``/``states`` the accepted part of the trajectory.
    """

    def __init__(
        self,
        message: str,
        t: float,
        times: Optional[np.ndarray] = None,
        states: Optional[np.ndarray] = None,
    ):
        super().__init__(message)
        self.t = t
        self.times = times
        self.states = states


class StepSizeUnderflow(IntegrationException):
    pass


class DependentFrame(IntegrationException):
    pass
