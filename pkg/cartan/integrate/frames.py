import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from ..constants import MAX_FRAME_CONDITION
from ..geometry.linalg import gram_drift, modified_gram_schmidt
from .exceptions import DependentFrame

logger = logging.getLogger(__name__)

MACHINE_ORTHONORMAL = 4 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class FrameState:
    t: float
    x: np.ndarray
    frame: np.ndarray  # vectors as columns, chart components
    gram_drift: float


def reorthonormalize(frame: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """
    Modified Gram-Schmidt in index order with respect to ``gram``. Frames already
    orthonormal to machine precision are returned unchanged.

    :raises DependentFrame: condition number of the frame above ``MAX_FRAME_CONDITION``
    """
    frame = np.asarray(frame, dtype=float)
    if frame.shape[1] == 0 or gram_drift(frame, gram) <= MACHINE_ORTHONORMAL:
        return frame.copy()
    factor = np.linalg.cholesky(gram).T
    condition = np.linalg.cond(factor @ frame)
    if not condition < MAX_FRAME_CONDITION:
        raise DependentFrame(f"Frame condition number {condition:.3e} too large")
    return modified_gram_schmidt(frame, gram)


@dataclass(frozen=True)
class FrameBlock:
    """
    Frame stored in a flattened state: ``count`` columns of ``dim`` components,
    column-major from ``start``. ``gram`` maps (t, state) to the inner product matrix.
    """

    start: int
    dim: int
    count: int
    gram: Callable[[float, np.ndarray], np.ndarray]

    @property
    def stop(self) -> int:
        return self.start + self.dim * self.count

    def read(self, state: np.ndarray) -> np.ndarray:
        return state[self.start : self.stop].reshape((self.dim, self.count), order="F")

    def write(self, state: np.ndarray, frame: np.ndarray) -> None:
        state[self.start : self.stop] = frame.flatten(order="F")


class StateProjector(ABC):
    @abstractmethod
    def drift(self, t: float, state: np.ndarray) -> float:
        pass

    @abstractmethod
    def project(self, t: float, state: np.ndarray) -> np.ndarray:
        pass


class FrameProjector(StateProjector):
    """
    Re-orthonormalizes the frame blocks of a flattened state
    """

    def __init__(self, blocks: Sequence[FrameBlock]):
        self.blocks: List[FrameBlock] = list(blocks)

    def drift(self, t: float, state: np.ndarray) -> float:
        drifts = [
            gram_drift(block.read(state), block.gram(t, state)) for block in self.blocks
        ]
        return max(drifts, default=0.0)

    def project(self, t: float, state: np.ndarray) -> np.ndarray:
        projected = state.copy()
        for block in self.blocks:
            block.write(
                projected, reorthonormalize(block.read(state), block.gram(t, state))
            )
        logger.debug("Re-orthonormalized %d frame blocks at t=%.6f", len(self.blocks), t)
        return projected
