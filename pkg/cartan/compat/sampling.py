import itertools
import logging
from typing import List, Tuple

import numpy as np

from ..constants import (
    DEFAULT_CURVE_COUNT,
    EXHAUSTIVE_QUADRUPLE_DIM,
    RANDOM_QUADRUPLE_COUNT,
)
from ..reconstruct import CahProblem
from ..transport import CurvePath

logger = logging.getLogger(__name__)

CHECK_CURVE_SAMPLES = 201
SUBMANIFOLD_MARGIN = 0.1
SEGMENT_LENGTH = (0.1, 0.5)  # fraction of the chart box diagonal
MAX_SHRINKS = 12


def sample_curves(
    problem: CahProblem,
    count: int = DEFAULT_CURVE_COUNT,
    seed: int = 0,
    samples: int = CHECK_CURVE_SAMPLES,
) -> List[CurvePath]:
    """
    Straight chart segments from random points of S in random directions. Segments
    leaving the source box are shortened until they fit.
    """
    rng = np.random.default_rng(seed)
    metric = problem.source
    sub = problem.source_sub
    curves = []
    for _ in range(count):
        u = sub.box.sample(rng, 1, margin=SUBMANIFOLD_MARGIN)[0]
        start = sub.point(u)
        direction = rng.standard_normal(metric.dim)
        direction /= np.linalg.norm(direction)
        length = rng.uniform(*SEGMENT_LENGTH) * metric.box.diagonal
        for _ in range(MAX_SHRINKS):
            if metric.contains(start + length * direction):
                break
            length *= 0.5
        curves.append(CurvePath.segment(metric, start, start + length * direction, samples))
    logger.debug("Sampled %d check curves with seed %d", count, seed)
    return curves


def index_tuples(
    shape: Tuple[int, ...], total_dim: int, rng: np.random.Generator
) -> List[Tuple[int, ...]]:
    """
    All index tuples of ``shape`` when the frame size ``total_dim`` is small,
    otherwise a seeded random subset
    """
    if any(size == 0 for size in shape):
        return []
    if total_dim <= EXHAUSTIVE_QUADRUPLE_DIM:
        return list(itertools.product(*(range(size) for size in shape)))
    columns = [rng.integers(0, size, RANDOM_QUADRUPLE_COUNT) for size in shape]
    return [tuple(int(column[k]) for column in columns) for k in range(RANDOM_QUADRUPLE_COUNT)]
