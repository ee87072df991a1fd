import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from ..constants import FD_CURVE_STEP, FD_U_STEP, SNAP_TOLERANCE
from ..geometry import BundleData, MetricField, SubmanifoldSpec
from ..geometry.exceptions import DimensionMismatch
from ..integrate import IntegratorConfig
from ..transport import CurvePath, check_orthonormal, transport_along_submanifold
from ..transport.curves import SECOND_DIFFERENCE_STEP
from .exceptions import FrameNotParallel, InvalidHomotopy

logger = logging.getLogger(__name__)

PARALLEL_TOLERANCE = 1e-8

SurfaceCallback = Callable[[float, float], np.ndarray]
ParameterCurve = Callable[[float], np.ndarray]
LiftCallback = Callable[
    [np.ndarray, np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]
]


@dataclass(frozen=True, eq=False)
class Homotopy:
    """
    Family of curves ``Phi(u, t)`` in M with ``Phi(u, 0) = x(base(u))`` on S.
    Missing t-derivatives are taken by central differences.
    """

    metric: MetricField
    submanifold: SubmanifoldSpec
    position: SurfaceCallback
    base: ParameterCurve
    velocity: Optional[SurfaceCallback] = None
    acceleration: Optional[SurfaceCallback] = None
    base_derivative: Optional[ParameterCurve] = None
    name: str = "homotopy"

    def __post_init__(self):
        if self.submanifold.ambient.dim != self.metric.dim:
            raise DimensionMismatch(
                f"{self.name}: submanifold lives in dimension {self.submanifold.ambient.dim}"
            )
        offset = self.start_offset(0.0)
        if offset > SNAP_TOLERANCE:
            raise InvalidHomotopy(
                f"{self.name}: Phi(0, 0) is {offset:.3e} away from {self.submanifold.name}"
            )

    def point(self, u: float, t: float) -> np.ndarray:
        return np.asarray(self.position(u, t), dtype=float)

    def tangent(self, u: float, t: float) -> np.ndarray:
        if self.velocity is not None:
            return np.asarray(self.velocity(u, t), dtype=float)
        return (self.point(u, t + FD_CURVE_STEP) - self.point(u, t - FD_CURVE_STEP)) / (
            2.0 * FD_CURVE_STEP
        )

    def second_derivative(self, u: float, t: float) -> np.ndarray:
        if self.acceleration is not None:
            return np.asarray(self.acceleration(u, t), dtype=float)
        if self.velocity is not None:
            return (
                self.tangent(u, t + FD_CURVE_STEP) - self.tangent(u, t - FD_CURVE_STEP)
            ) / (2.0 * FD_CURVE_STEP)
        step = SECOND_DIFFERENCE_STEP
        return (
            self.point(u, t + step) - 2.0 * self.point(u, t) + self.point(u, t - step)
        ) / step ** 2

    def base_point(self, u: float) -> np.ndarray:
        return np.asarray(self.base(u), dtype=float)

    def base_velocity(self, u: float) -> np.ndarray:
        """
        :return: ``d theta / du`` in S parameters
        """
        if self.base_derivative is not None:
            return np.asarray(self.base_derivative(u), dtype=float)
        return (self.base_point(u + FD_CURVE_STEP) - self.base_point(u - FD_CURVE_STEP)) / (
            2.0 * FD_CURVE_STEP
        )

    def start_offset(self, u: float) -> float:
        """
        Chart distance between ``Phi(u, 0)`` and ``x(base(u))``
        """
        return float(
            np.linalg.norm(self.point(u, 0.0) - self.submanifold.point(self.base_point(u)))
        )

    def slice(self, u: float, samples: int = 101) -> CurvePath:
        return CurvePath.from_function(
            self.metric,
            lambda t: self.point(u, t),
            velocity=lambda t: self.tangent(u, t),
            acceleration=lambda t: self.second_derivative(u, t),
            samples=samples,
        )

    @classmethod
    def cone(
        cls,
        metric: MetricField,
        submanifold: SubmanifoldSpec,
        base: ParameterCurve,
        endpoint: np.ndarray,
        base_derivative: Optional[ParameterCurve] = None,
        name: str = "cone",
    ) -> "Homotopy":
        """
        Chart segments from ``x(base(u))`` to a common ``endpoint``
        """
        endpoint = np.asarray(endpoint, dtype=float)

        def start(u: float) -> np.ndarray:
            return submanifold.point(np.asarray(base(u), dtype=float))

        return cls(
            metric,
            submanifold,
            position=lambda u, t: start(u) + t * (endpoint - start(u)),
            base=base,
            velocity=lambda u, t: endpoint - start(u),
            acceleration=lambda u, t: np.zeros_like(endpoint),
            base_derivative=base_derivative,
            name=name,
        )

    @classmethod
    def between_curves(
        cls,
        metric: MetricField,
        submanifold: SubmanifoldSpec,
        first: CurvePath,
        second: CurvePath,
        name: str = "straight-line",
    ) -> "Homotopy":
        """
        Straight-line homotopy from ``first`` to ``second``. Both curves must share
        their endpoint and start on S; the start of every slice is moved onto S along
        the straight line between the projected start parameters.
        """
        if np.linalg.norm(first.end - second.end) > SNAP_TOLERANCE:
            raise InvalidHomotopy(f"{name}: curves do not share their endpoint")
        parameters = []
        for curve in (first, second):
            parameter, distance = submanifold.project(curve.start)
            if distance > SNAP_TOLERANCE:
                raise InvalidHomotopy(
                    f"{name}: curve starts {distance:.3e} away from {submanifold.name}"
                )
            parameters.append(parameter)
        first_parameter, second_parameter = parameters
        direction = second_parameter - first_parameter
        first_start = first.position(0.0)
        second_start = second.position(0.0)

        def base(u: float) -> np.ndarray:
            return first_parameter + u * direction

        def correction(u: float) -> np.ndarray:
            return submanifold.point(base(u)) - (
                (1.0 - u) * first_start + u * second_start
            )

        return cls(
            metric,
            submanifold,
            position=lambda u, t: (1.0 - u) * first.position(t)
            + u * second.position(t)
            + (1.0 - t) * correction(u),
            base=base,
            velocity=lambda u, t: (1.0 - u) * first.velocity(t)
            + u * second.velocity(t)
            - correction(u),
            acceleration=lambda u, t: (1.0 - u) * first.acceleration(t)
            + u * second.acceleration(t),
            base_derivative=lambda u: direction.copy(),
            name=name,
        )

    @classmethod
    def constant(
        cls, metric: MetricField, submanifold: SubmanifoldSpec, curve: CurvePath
    ) -> "Homotopy":
        parameter, distance = submanifold.project(curve.start)
        if distance > SNAP_TOLERANCE:
            raise InvalidHomotopy(f"Curve starts {distance:.3e} away from {submanifold.name}")
        return cls(
            metric,
            submanifold,
            position=lambda u, t: curve.position(t),
            base=lambda u: parameter.copy(),
            velocity=lambda u, t: curve.velocity(t),
            acceleration=lambda u, t: curve.acceleration(t),
            base_derivative=lambda u: np.zeros_like(parameter),
            name="constant",
        )


@dataclass(frozen=True, eq=False)
class TargetLift:
    """
    Target metric with the map ``(theta(u), e_A(u), f_alpha(u)) -> (theta~(u), e~_A(u))``
    sending the source frames along the base curve to the initial frames of the
    generalized developments.
    """

    metric: MetricField
    lift: LiftCallback

    def __call__(
        self, parameter: np.ndarray, frame: np.ndarray, fiber_frame: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        point, target_frame = self.lift(parameter, frame, fiber_frame)
        point = np.asarray(point, dtype=float)
        target_frame = np.asarray(target_frame, dtype=float)
        size = frame.shape[0] + fiber_frame.shape[0]
        if self.metric.dim != size or target_frame.shape != (size, size):
            raise DimensionMismatch(
                f"Target of dimension {self.metric.dim} for a split {frame.shape[0]}"
                f"+{fiber_frame.shape[0]}"
            )
        check_orthonormal(target_frame, self.metric.g(point), "Lifted frame")
        return point, target_frame


def transport_base_frames(
    homotopy: Homotopy,
    span: Tuple[float, float],
    frame: np.ndarray,
    fiber_frame: np.ndarray,
    bundle: Optional[BundleData],
    config: Optional[IntegratorConfig],
) -> Tuple[np.ndarray, np.ndarray]:
    if span[0] == span[1]:
        return frame.copy(), fiber_frame.copy()
    transport = transport_along_submanifold(
        homotopy.submanifold,
        homotopy.base,
        frame,
        span=span,
        base_derivative=homotopy.base_derivative,
        bundle=bundle,
        fiber_frame=fiber_frame if bundle is not None else None,
        config=config,
        t_eval=list(span),
    )
    return transport.final_frame, transport.final_fiber_frame


@dataclass(frozen=True, eq=False)
class FamilyInput:
    """
    Data of one ``u``-slice of a family: adapted frames ``e_A(u)`` parallel along the
    base curve (tangent part in S, normal part for the normal connection, fiber
    part for ``D``), the same frames at ``u +- delta``, ``theta_i(u)`` and
    ``sigma_ij^mu(u)``.
    """

    homotopy: Homotopy
    u: float
    parameter: np.ndarray
    frame: np.ndarray  # (n, n), columns [T | N]
    fiber_frame: np.ndarray  # (s, s)
    forward_frames: Tuple[np.ndarray, np.ndarray]  # at u + delta
    backward_frames: Tuple[np.ndarray, np.ndarray]  # at u - delta
    theta: np.ndarray  # (r,)
    sigma: np.ndarray  # (r, r, n - r)
    delta: float = FD_U_STEP
    bundle: Optional[BundleData] = None
    target_lift: Optional[TargetLift] = None

    @classmethod
    def build(
        cls,
        homotopy: Homotopy,
        u: float,
        bundle: Optional[BundleData] = None,
        target_lift: Optional[TargetLift] = None,
        delta: float = FD_U_STEP,
        config: Optional[IntegratorConfig] = None,
    ) -> "FamilyInput":
        """
        Transport the adapted frame at ``x(base(0))`` along the base curve to ``u``
        and ``u +- delta``.

        :raises FrameNotParallel: transported frames fail the parallelism check
        """
        sub = homotopy.submanifold
        start = homotopy.base_point(0.0)
        frame = sub.adapted_frame(start)
        rank = bundle.rank if bundle is not None else 0
        fiber_frame = np.zeros((0, 0))
        if bundle is not None:
            fiber_frame = bundle.orthonormal_frame(sub.point(start))
        frame, fiber_frame = transport_base_frames(
            homotopy, (0.0, u), frame, fiber_frame, bundle, config
        )
        fiber_frame = fiber_frame.reshape(rank, rank)
        forward, backward = (
            transport_base_frames(
                homotopy, (u, u + step), frame, fiber_frame, bundle, config
            )
            for step in (delta, -delta)
        )

        parameter = homotopy.base_point(u)
        x = sub.point(parameter)
        g = sub.ambient.g(x)
        velocity = sub.jacobian_at(parameter) @ homotopy.base_velocity(u)
        theta = frame[:, : sub.dim].T @ g @ velocity
        family = cls(
            homotopy=homotopy,
            u=float(u),
            parameter=parameter,
            frame=frame,
            fiber_frame=fiber_frame,
            forward_frames=(forward[0], forward[1].reshape(rank, rank)),
            backward_frames=(backward[0], backward[1].reshape(rank, rank)),
            theta=theta,
            sigma=sub.sigma_components(parameter, frame),
            delta=delta,
            bundle=bundle,
            target_lift=target_lift,
        )
        family.validate()
        logger.debug("Family input at u=%.6f on %s", u, homotopy.name)
        return family

    @property
    def dim(self) -> int:
        return self.homotopy.metric.dim

    @property
    def rank(self) -> int:
        return self.bundle.rank if self.bundle is not None else 0

    @property
    def sub_dim(self) -> int:
        return self.homotopy.submanifold.dim

    def parallel_residual(self) -> float:
        """
        Max frame component of ``nabla_{theta'} e_i`` along S, ``nabla^perp e_mu`` and
        ``D f_alpha``, from the frames at ``u +- delta``
        """
        sub = self.homotopy.submanifold
        r = self.sub_dim
        x = sub.point(self.parameter)
        g = sub.ambient.g(x)
        velocity = sub.jacobian_at(self.parameter) @ self.homotopy.base_velocity(self.u)
        derivative = (self.forward_frames[0] - self.backward_frames[0]) / (
            2.0 * self.delta
        ) + np.einsum("abc,b,cm->am", sub.ambient.christoffel(x), velocity, self.frame)
        components = self.frame.T @ g @ derivative
        residuals = [0.0]
        if r:
            residuals.append(float(np.max(np.abs(components[:r, :r]))))
        if r < self.dim:
            residuals.append(float(np.max(np.abs(components[r:, r:]))))
        if self.rank:
            fiber_derivative = (self.forward_frames[1] - self.backward_frames[1]) / (
                2.0 * self.delta
            ) + np.einsum(
                "c,cab,bm->am", velocity, self.bundle.connection_at(x), self.fiber_frame
            )
            residuals.append(float(np.max(np.abs(fiber_derivative))))
        return max(residuals)

    def validate(self) -> None:
        sub = self.homotopy.submanifold
        x = sub.point(self.parameter)
        if self.frame.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"Family frame must be {self.dim}x{self.dim}")
        if self.fiber_frame.shape != (self.rank, self.rank):
            raise DimensionMismatch(f"Family fiber frame must be {self.rank}x{self.rank}")
        check_orthonormal(self.frame, sub.ambient.g(x), "Family frame")
        if self.rank:
            check_orthonormal(self.fiber_frame, self.bundle.metric_at(x), "Family fiber frame")
        residual = self.parallel_residual()
        if residual > PARALLEL_TOLERANCE:
            raise FrameNotParallel(
                f"Frames at u={self.u} are not parallel along the base curve, "
                f"residual {residual:.3e}",
                residual=residual,
            )

    def initial_rotation(self) -> np.ndarray:
        """
        ``X_ab(u, 0)``: ``X_i,mu = sigma_ij^mu theta_j``, all other blocks zero
        """
        r = self.sub_dim
        rotation = np.zeros((self.dim, self.dim))
        block = np.einsum("ijm,j->im", self.sigma, self.theta)
        rotation[:r, r:] = block
        rotation[r:, :r] = -block.T
        return rotation

    def initial_variation(self) -> np.ndarray:
        """
        ``U_a(u, 0)``: ``theta_i`` on the tangent indices, zero on the normal ones
        """
        variation = np.zeros(self.dim)
        variation[: self.sub_dim] = self.theta
        return variation
