import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..constants import FD_CURVE_STEP
from ..geometry import BundleData, FrameSplit, SubmanifoldSpec
from ..geometry.exceptions import DimensionMismatch
from ..integrate import (
    DomainExit,
    FrameBlock,
    FrameProjector,
    IntegratorConfig,
    integrate_ivp,
)
from .curves import CurvePath, HProfile
from .develop import check_orthonormal, frame_from_state
from .exceptions import CurveOutsideDomain

logger = logging.getLogger(__name__)

ParameterCurve = Callable[[float], np.ndarray]


def _parameter_velocity(
    base: ParameterCurve, base_derivative: Optional[ParameterCurve], s: float
) -> np.ndarray:
    if base_derivative is not None:
        return np.asarray(base_derivative(s), dtype=float)
    return (np.asarray(base(s + FD_CURVE_STEP)) - np.asarray(base(s - FD_CURVE_STEP))) / (
        2.0 * FD_CURVE_STEP
    )


def bundle_transport(
    bundle: BundleData,
    curve: CurvePath,
    fiber_frame: np.ndarray,
    config: Optional[IntegratorConfig] = None,
) -> np.ndarray:
    """
    D-parallel fiber frames along ``curve``, sampled on its grid, shape ``(K, s, m)``
    """
    rank = bundle.rank
    fiber_frame = np.asarray(fiber_frame, dtype=float)
    count = fiber_frame.shape[1] if fiber_frame.ndim == 2 else 0
    if rank == 0 or count == 0:
        return np.zeros((curve.t.shape[0], rank, count))

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        current = frame_from_state(state, 0, rank, count)
        connection = bundle.connection_at(curve.position(t))
        derivative = -np.einsum("c,cab,bm->am", curve.velocity(t), connection, current)
        return derivative.flatten(order="F")

    projector = FrameProjector(
        [
            FrameBlock(
                0, rank, count, gram=lambda t, state: bundle.metric_at(curve.position(t))
            )
        ]
    )
    try:
        trajectory = integrate_ivp(
            rhs,
            fiber_frame.flatten(order="F"),
            (0.0, 1.0),
            config,
            t_eval=curve.t,
            projector=projector,
        )
    except DomainExit as exc:
        raise CurveOutsideDomain(f"Curve left the chart at t={exc.t:.9g}") from exc
    return trajectory.y.reshape(-1, count, rank).transpose(0, 2, 1)


def h_components(
    bundle: BundleData, x: np.ndarray, frame: np.ndarray, fiber_frame: np.ndarray
) -> np.ndarray:
    """
    :return: ``h[a, b, alpha] = h_V(h(E_a, E_b), F_alpha)``
    """
    return np.einsum(
        "pqb,pa,qc,bg,gd->acd",
        bundle.h_at(x),
        frame,
        frame,
        bundle.metric_at(x),
        fiber_frame,
    )


def pullback_h_profile(
    bundle: BundleData,
    curve: CurvePath,
    frames: np.ndarray,
    fiber_frames: np.ndarray,
) -> HProfile:
    """
    ``P_t^0(gamma) h`` as components ``h_ab^alpha(t)`` in the transported frames
    """
    split = FrameSplit(curve.dim, bundle.rank)
    values = np.array(
        [
            h_components(bundle, curve.points[k], frames[k], fiber_frames[k])
            for k in range(curve.t.shape[0])
        ]
    ).reshape(curve.t.shape[0], curve.dim, curve.dim, bundle.rank)
    return HProfile.from_samples(split, curve.t, values)


@dataclass(frozen=True, eq=False)
class AdaptedTransport:
    """
    Frames along a curve in S: tangent part parallel for the induced connection,
    normal part parallel for the normal connection, fiber part D-parallel.
    """

    s: np.ndarray
    parameters: np.ndarray  # (K, r)
    points: np.ndarray  # (K, n)
    frames: np.ndarray  # (K, n, n), columns [T | N]
    fiber_frames: np.ndarray  # (K, rank, rank)

    @property
    def final_frame(self) -> np.ndarray:
        return self.frames[-1]

    @property
    def final_fiber_frame(self) -> np.ndarray:
        return self.fiber_frames[-1]


def _adapted_mixing(
    sub: SubmanifoldSpec, u: np.ndarray, direction: np.ndarray, frame: np.ndarray
) -> np.ndarray:
    """
    Skew matrix ``W`` with ``nabla_{x'} E = E W``: ``W[mu, i] = <sigma(x', T_i), N_mu>``
    """
    r = sub.dim
    x = sub.point(u)
    g = sub.ambient.g(x)
    jacobian = sub.jacobian_at(u)
    tangent_coefficients = sub.tangent_coefficients(jacobian, g, frame[:, :r])
    sigma = np.einsum(
        "kpq,p,qi->ki", sub.sigma_tensor(u), direction, tangent_coefficients
    )
    block = frame[:, r:].T @ g @ sigma
    mixing = np.zeros((sub.ambient.dim, sub.ambient.dim))
    mixing[r:, :r] = block
    mixing[:r, r:] = -block.T
    return mixing


def transport_along_submanifold(
    sub: SubmanifoldSpec,
    base: ParameterCurve,
    frame: np.ndarray,
    span: Tuple[float, float] = (0.0, 1.0),
    base_derivative: Optional[ParameterCurve] = None,
    bundle: Optional[BundleData] = None,
    fiber_frame: Optional[np.ndarray] = None,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> AdaptedTransport:
    """
    Transport an adapted frame ``[T | N]`` (and a fiber frame) along ``s -> x(base(s))``

    :param base: parameter curve in the box of ``sub``
    :param frame: g-orthonormal frame at ``x(base(span[0]))``, tangent columns first
    """
    dim = sub.ambient.dim
    rank = bundle.rank if bundle is not None else 0
    frame = np.asarray(frame, dtype=float)
    fiber_frame = (
        np.zeros((0, 0)) if fiber_frame is None else np.asarray(fiber_frame, dtype=float)
    )
    if frame.shape != (dim, dim) or fiber_frame.shape != (rank, rank):
        raise DimensionMismatch("Adapted frames must be square and match the bundle rank")
    u0 = np.asarray(base(span[0]), dtype=float)
    check_orthonormal(frame, sub.ambient.g(sub.point(u0)), "Adapted frame")

    def rhs(s: float, state: np.ndarray) -> np.ndarray:
        u = np.asarray(base(s), dtype=float)
        direction = _parameter_velocity(base, base_derivative, s)
        x = sub.point(u)
        velocity = sub.jacobian_at(u) @ direction
        current = frame_from_state(state, 0, dim, dim)
        derivative = -np.einsum(
            "abc,b,cm->am", sub.ambient.christoffel(x), velocity, current
        ) + current @ _adapted_mixing(sub, u, direction, current)
        parts = [derivative.flatten(order="F")]
        if rank:
            fibers = frame_from_state(state, dim * dim, rank, rank)
            fiber_derivative = -np.einsum(
                "c,cab,bm->am", velocity, bundle.connection_at(x), fibers
            )
            parts.append(fiber_derivative.flatten(order="F"))
        return np.concatenate(parts)

    blocks = [
        FrameBlock(0, dim, dim, gram=lambda s, state: sub.ambient.g(sub.point(base(s))))
    ]
    if rank:
        blocks.append(
            FrameBlock(
                dim * dim,
                rank,
                rank,
                gram=lambda s, state: bundle.metric_at(sub.point(base(s))),
            )
        )
    y0 = np.concatenate([frame.flatten(order="F"), fiber_frame.flatten(order="F")])
    try:
        trajectory = integrate_ivp(
            rhs, y0, span, config, t_eval=t_eval, projector=FrameProjector(blocks)
        )
    except DomainExit as exc:
        raise CurveOutsideDomain(f"Path in {sub.name} left the chart at s={exc.t:.9g}") from exc

    samples = trajectory.t.shape[0]
    parameters = np.array([np.asarray(base(s), dtype=float) for s in trajectory.t])
    frames = trajectory.y[:, : dim * dim].reshape(samples, dim, dim).transpose(0, 2, 1)
    fiber_frames = (
        trajectory.y[:, dim * dim :].reshape(samples, rank, rank).transpose(0, 2, 1)
    )
    return AdaptedTransport(
        s=trajectory.t,
        parameters=parameters.reshape(samples, sub.dim),
        points=np.array([sub.point(u) for u in parameters]),
        frames=frames,
        fiber_frames=fiber_frames,
    )


def direct_sum_transport(
    sub: SubmanifoldSpec,
    bundle: BundleData,
    base: ParameterCurve,
    normal: np.ndarray,
    fiber: np.ndarray,
    span: Tuple[float, float] = (0.0, 1.0),
    base_derivative: Optional[ParameterCurve] = None,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Parallel section of ``D~`` on ``T^perp S + V`` along ``s -> x(base(s))``

    :return: sampled ``s``, normal parts ``(K, n)`` and fiber parts ``(K, rank)``
    """
    dim = sub.ambient.dim
    r = sub.dim
    rank = bundle.rank

    def rhs(s: float, state: np.ndarray) -> np.ndarray:
        u = np.asarray(base(s), dtype=float)
        direction = _parameter_velocity(base, base_derivative, s)
        x = sub.point(u)
        velocity = sub.jacobian_at(u) @ direction
        xi, eta = state[:dim], state[dim:]
        g = sub.ambient.g(x)
        tangent = sub.adapted_frame(u)[:, :r]
        tangent_coefficients = sub.tangent_coefficients(sub.jacobian_at(u), g, tangent)
        sigma = np.einsum(
            "kpq,p,qi->ki", sub.sigma_tensor(u), direction, tangent_coefficients
        )
        shape_part = tangent @ (sigma.T @ g @ xi)
        xi_derivative = (
            -np.einsum("abc,b,c->a", sub.ambient.christoffel(x), velocity, xi)
            - shape_part
            + sub.normal_projector(u) @ (bundle.shape_operator(x, eta) @ velocity)
        )
        eta_derivative = -np.einsum(
            "c,cab,b->a", velocity, bundle.connection_at(x), eta
        ) - bundle.h_vector(x, velocity, xi)
        return np.concatenate([xi_derivative, eta_derivative])

    y0 = np.concatenate([np.asarray(normal, dtype=float), np.asarray(fiber, dtype=float)])
    try:
        trajectory = integrate_ivp(rhs, y0, span, config, t_eval=t_eval)
    except DomainExit as exc:
        raise CurveOutsideDomain(f"Path in {sub.name} left the chart at s={exc.t:.9g}") from exc
    return trajectory.t, trajectory.y[:, :dim], trajectory.y[:, dim:]
