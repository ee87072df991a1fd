# flake8: noqa F401
from .config import IntegrationMethod, IntegratorConfig, ReorthoPolicy
from .exceptions import (
    DependentFrame,
    DomainExit,
    IntegrationException,
    InvalidIntegratorConfig,
    StepSizeUnderflow,
)
from .frames import (
    FrameBlock,
    FrameProjector,
    FrameState,
    StateProjector,
    reorthonormalize,
)
from .ivp import Trajectory, integrate_ivp, rk4_step
