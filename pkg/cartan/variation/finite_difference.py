import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..geometry import FrameSplit, MetricField
from ..integrate import IntegratorConfig
from ..transport import (
    CurvePath,
    HProfile,
    anti_develop,
    bundle_transport,
    generalized_develop,
    pullback_h_profile,
    transport_frames,
)
from .exceptions import VariationException
from .family import FamilyInput, transport_base_frames

logger = logging.getLogger(__name__)

DEFAULT_DELTA = 1e-4
DEFAULT_SAMPLES = 101


@dataclass(frozen=True, eq=False)
class FiniteDifferenceVariation:
    """
    ``U_A`` and ``X_AB`` of a family from central differences in ``u``, in the
    transported frames of the ``u``-slice
    """

    t: np.ndarray
    U: np.ndarray  # (K, N)
    X: np.ndarray  # (K, N, N)
    delta: float


def _neighbour_frames(
    family: FamilyInput, delta: float, config: Optional[IntegratorConfig]
) -> List[Tuple[float, np.ndarray, np.ndarray]]:
    slices = [(family.u, family.frame, family.fiber_frame)]
    for step in (delta, -delta):
        frame, fiber_frame = transport_base_frames(
            family.homotopy,
            (family.u, family.u + step),
            family.frame,
            family.fiber_frame,
            family.bundle,
            config,
        )
        slices.append(
            (family.u + step, frame, fiber_frame.reshape(family.rank, family.rank))
        )
    return slices


def _differences(
    metric: MetricField,
    points: Tuple[np.ndarray, np.ndarray, np.ndarray],
    frames: Tuple[np.ndarray, np.ndarray, np.ndarray],
    delta: float,
) -> Tuple[np.ndarray, np.ndarray]:
    center, forward, backward = points
    center_frames, forward_frames, backward_frames = frames
    U, X = [], []
    for k in range(center.shape[0]):
        g = metric.g(center[k])
        variation = (forward[k] - backward[k]) / (2.0 * delta)
        frame = center_frames[k]
        covariant = (forward_frames[k] - backward_frames[k]) / (2.0 * delta) + np.einsum(
            "abc,b,cm->am", metric.christoffel(center[k]), variation, frame
        )
        U.append(frame.T @ g @ variation)
        X.append(covariant.T @ g @ frame)
    return np.array(U), np.array(X)


def finite_difference_variation(
    family: FamilyInput,
    delta: float = DEFAULT_DELTA,
    samples: int = DEFAULT_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> FiniteDifferenceVariation:
    """
    ``U_a = <(Phi(u + delta, t) - Phi(u - delta, t)) / 2 delta, E_a(u, t)>`` and
    ``X_ab = <nabla_u E_a, E_b>`` with parallel frames along the three slices
    """
    homotopy = family.homotopy
    curves: List[CurvePath] = []
    frames = []
    for u, frame, _ in _neighbour_frames(family, delta, config):
        curve = homotopy.slice(u, samples)
        curves.append(curve)
        frames.append(transport_frames(curve, frame, config))
    U, X = _differences(
        homotopy.metric,
        tuple(curve.points for curve in curves),
        tuple(frames),
        delta,
    )
    return FiniteDifferenceVariation(t=curves[0].t, U=U, X=X, delta=delta)


def finite_difference_generalized_variation(
    family: FamilyInput,
    delta: float = DEFAULT_DELTA,
    samples: int = DEFAULT_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> FiniteDifferenceVariation:
    """
    ``U~_A`` and ``X~_AB`` from the generalized developments of the slices
    ``u``, ``u +- delta``, each built from its anti-development and pulled back h,
    started at the lifted frames.
    """
    lift = family.target_lift
    if lift is None:
        raise VariationException("Generalized variations need a target lift")
    homotopy = family.homotopy
    bundle = family.bundle
    split = FrameSplit(family.dim, family.rank)
    developments = []
    for u, frame, fiber_frame in _neighbour_frames(family, delta, config):
        curve = homotopy.slice(u, samples)
        velocity = anti_develop(curve, frame, config)
        if bundle is not None and bundle.rank:
            fiber_frames = bundle_transport(bundle, curve, fiber_frame, config)
            h = pullback_h_profile(
                bundle, curve, velocity.transported_frames, fiber_frames
            )
        else:
            h = HProfile.zero(split)
        point, target_frame = lift(homotopy.base_point(u), frame, fiber_frame)
        developments.append(
            generalized_develop(
                lift.metric, point, target_frame, split, velocity, h, config, t_eval=curve.t
            )
        )
    U, X = _differences(
        lift.metric,
        tuple(development.points for development in developments),
        tuple(development.frames for development in developments),
        delta,
    )
    logger.debug("Finite difference generalized variation at u=%.6f", family.u)
    return FiniteDifferenceVariation(t=developments[0].t, U=U, X=X, delta=delta)
