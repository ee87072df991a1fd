import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from ..geometry import FrameSplit, MetricField
from ..geometry.exceptions import DimensionMismatch
from ..geometry.linalg import gram_drift, modified_gram_schmidt
from ..integrate import (
    DomainExit,
    FrameBlock,
    FrameProjector,
    FrameState,
    IntegratorConfig,
    integrate_ivp,
)
from .curves import CurvePath, HProfile, VelocityProfile
from .exceptions import (
    CurveOutsideDomain,
    DevelopmentNotExisting,
    NonOrthonormalFrame,
    ParameterOutsideGrid,
)

logger = logging.getLogger(__name__)

ORTHONORMAL_TOLERANCE = 1e-8


def frame_from_state(state: np.ndarray, start: int, dim: int, count: int) -> np.ndarray:
    return state[start : start + dim * count].reshape((dim, count), order="F")


def check_orthonormal(frame: np.ndarray, gram: np.ndarray, label: str = "frame") -> None:
    drift = gram_drift(frame, gram)
    if drift > ORTHONORMAL_TOLERANCE:
        raise NonOrthonormalFrame(f"{label} is not orthonormal, Gram drift {drift:.3e}")


def standard_frame(metric: MetricField, x: np.ndarray) -> np.ndarray:
    """
    g-orthonormal frame at ``x`` from Gram-Schmidt of the chart axes
    """
    return modified_gram_schmidt(np.eye(metric.dim), metric.g(x))


@dataclass(frozen=True, eq=False)
class Development:
    """
    Sampled (generalized) development with its frame history ``E_A(t_k)``
    """

    curve: CurvePath
    frames: np.ndarray  # (K, N, N), columns E_A
    split: FrameSplit
    steps: int = 0

    @property
    def t(self) -> np.ndarray:
        return self.curve.t

    @property
    def points(self) -> np.ndarray:
        return self.curve.points

    @property
    def endpoint(self) -> np.ndarray:
        return self.curve.end

    @property
    def final_frame(self) -> np.ndarray:
        return self.frames[-1]

    def index_of(self, t: float) -> int:
        index = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[index] - t) > 1e-12:
            raise ParameterOutsideGrid(f"t={t} is not on the solved grid")
        return index

    def state(self, index: int) -> FrameState:
        metric = self.curve.metric
        frame = self.frames[index]
        point = self.points[index]
        return FrameState(
            t=float(self.t[index]),
            x=point,
            frame=frame,
            gram_drift=gram_drift(frame, metric.g(point)),
        )

    def states(self) -> List[FrameState]:
        return [self.state(index) for index in range(self.t.shape[0])]

    def max_gram_drift(self) -> float:
        return max(state.gram_drift for state in self.states())

    def transport_matrix(self, t: float) -> np.ndarray:
        """
        Chart matrix of ``D_0^t``, sending ``sum c_A E_A(0)`` to ``sum c_A E_A(t)``
        """
        index = self.index_of(t)
        return self.frames[index] @ np.linalg.inv(self.frames[0])


def parallel_transport(
    curve: CurvePath,
    vectors: np.ndarray,
    t0: float = 0.0,
    t1: float = 1.0,
    config: Optional[IntegratorConfig] = None,
) -> np.ndarray:
    """
    Parallel displacement along ``curve`` from ``gamma(t0)`` to ``gamma(t1)``

    :param vectors: one vector ``(n,)`` or several as columns ``(n, m)``
    """
    metric = curve.metric
    vectors = np.asarray(vectors, dtype=float)
    single = vectors.ndim == 1
    block = vectors.reshape(metric.dim, -1)
    count = block.shape[1]
    if block.shape[0] != metric.dim:
        raise DimensionMismatch(f"Vectors must have {metric.dim} components")
    for value in (t0, t1):
        if not 0.0 <= value <= 1.0:
            raise ParameterOutsideGrid(f"t={value} outside of [0, 1]")

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        frame = frame_from_state(state, 0, metric.dim, count)
        gamma = metric.christoffel(curve.position(t))
        derivative = -np.einsum("abc,b,cm->am", gamma, curve.velocity(t), frame)
        return derivative.flatten(order="F")

    try:
        trajectory = integrate_ivp(
            rhs, block.flatten(order="F"), (t0, t1), config, t_eval=[t0, t1]
        )
    except DomainExit as exc:
        raise CurveOutsideDomain(f"Curve left the chart at t={exc.t:.9g}") from exc
    result = frame_from_state(trajectory.final, 0, metric.dim, count)
    return result[:, 0] if single else result


def _development(
    metric: MetricField,
    p: np.ndarray,
    frame: np.ndarray,
    split: FrameSplit,
    v: VelocityProfile,
    h: HProfile,
    config: Optional[IntegratorConfig],
    t_eval: Optional[Sequence[float]],
) -> Development:
    dim = metric.dim
    n, s = split.tangent_count, split.normal_count
    p = metric.box.check(p, metric.name)
    frame = np.asarray(frame, dtype=float)
    if split.total != dim or frame.shape != (dim, dim):
        raise DimensionMismatch(
            f"Split {n}+{s} and frame {frame.shape} do not match dimension {dim}"
        )
    check_orthonormal(frame, metric.g(p), "Initial frame")
    if v(0.0).shape != (n,):
        raise DimensionMismatch(f"Velocity profile must have {n} components")
    if h(0.0).shape != (n, n, s):
        raise DimensionMismatch(f"h profile must have shape {(n, n, s)}")

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        x = state[:dim]
        current = frame_from_state(state, dim, dim, dim)
        gamma = metric.christoffel(x)
        components = v(t)
        velocity = current[:, :n] @ components
        derivative = -np.einsum("abc,b,cm->am", gamma, velocity, current)
        if s:
            mixing = np.einsum("b,bia->ia", components, h(t))
            omega = np.zeros((dim, dim))
            omega[n:, :n] = mixing.T
            omega[:n, n:] = -mixing
            derivative = derivative + current @ omega
        return np.concatenate([velocity, derivative.flatten(order="F")])

    projector = FrameProjector(
        [FrameBlock(dim, dim, dim, gram=lambda t, state: metric.g(state[:dim]))]
    )
    y0 = np.concatenate([p, frame.flatten(order="F")])
    try:
        trajectory = integrate_ivp(
            rhs, y0, (0.0, 1.0), config, t_eval=t_eval, projector=projector
        )
    except DomainExit as exc:
        raise DevelopmentNotExisting(
            f"Development left {metric.name} at t={exc.t:.9g}", exit_time=exc.t
        ) from exc

    points = trajectory.y[:, :dim]
    for index, point in enumerate(points):
        if not metric.contains(point):
            exit_time = float(trajectory.t[max(index - 1, 0)])
            raise DevelopmentNotExisting(
                f"Development left {metric.name} at t={exit_time:.9g}",
                exit_time=exit_time,
            )
    frames = trajectory.y[:, dim:].reshape(-1, dim, dim).transpose(0, 2, 1)
    velocities = np.einsum(
        "kam,km->ka", frames[:, :, :n], np.array([v(t) for t in trajectory.t])
    )
    curve = CurvePath.from_samples(metric, trajectory.t, points, velocities=velocities)
    logger.debug(
        "Development on %s finished at %s (%d steps)", metric.name, points[-1], trajectory.steps
    )
    return Development(curve=curve, frames=frames, split=split, steps=trajectory.steps)


def develop(
    metric: MetricField,
    p: np.ndarray,
    frame: np.ndarray,
    v: VelocityProfile,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> Development:
    """
    Development of ``v``: the curve with ``gamma(0) = p`` and
    ``gamma'(t) = P_0^t(gamma) v(t)``, solved together with the parallel frame.

    :raises DevelopmentNotExisting: the curve leaves the chart before ``t = 1``
    """
    split = FrameSplit(metric.dim, 0)
    return _development(metric, p, frame, split, v, HProfile.zero(split), config, t_eval)


def generalized_develop(
    metric: MetricField,
    p: np.ndarray,
    frame: np.ndarray,
    split: FrameSplit,
    v: VelocityProfile,
    h: HProfile,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> Development:
    """
    Generalized development of ``(v, h)``. The first ``split.tangent_count`` frame
    columns span T, the remaining ones N:

    - ``gamma' = v_a E_a``
    - ``nabla_{gamma'} E_i = h_ib^alpha v_b E_alpha``
    - ``nabla_{gamma'} E_alpha = -h_ib^alpha v_b E_i``

    :raises DevelopmentNotExisting: the curve leaves the chart before ``t = 1``
    """
    return _development(metric, p, frame, split, v, h, config, t_eval)


def generalized_transport(development: Development, t: float) -> np.ndarray:
    return development.transport_matrix(t)


def anti_develop(
    curve: CurvePath,
    frame: Optional[np.ndarray] = None,
    config: Optional[IntegratorConfig] = None,
) -> VelocityProfile:
    """
    Components of ``P_t^0(gamma) gamma'(t)`` in ``frame`` (chart-axes Gram-Schmidt
    frame at ``gamma(0)`` by default), sampled on the curve grid.
    """
    metric = curve.metric
    dim = metric.dim
    start = curve.start
    frame = standard_frame(metric, start) if frame is None else np.asarray(frame, float)
    check_orthonormal(frame, metric.g(start), "Initial frame")
    frames = transport_frames(curve, frame, config)
    velocities = curve.sampled_velocities()
    values = np.array(
        [np.linalg.solve(frames[k], velocities[k]) for k in range(curve.t.shape[0])]
    )
    logger.debug("Anti-developed curve on %s (%d samples)", metric.name, values.shape[0])
    return VelocityProfile.from_samples(
        start, frame, curve.t, values, transported_frames=frames
    )


def transport_frames(
    curve: CurvePath, frame: np.ndarray, config: Optional[IntegratorConfig] = None
) -> np.ndarray:
    """
    Parallel frames along ``curve`` sampled on its grid, shape ``(K, n, m)``
    """
    metric = curve.metric
    dim = metric.dim
    count = frame.shape[1]

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        current = frame_from_state(state, 0, dim, count)
        gamma = metric.christoffel(curve.position(t))
        derivative = -np.einsum("abc,b,cm->am", gamma, curve.velocity(t), current)
        return derivative.flatten(order="F")

    projector = FrameProjector(
        [FrameBlock(0, dim, count, gram=lambda t, state: metric.g(curve.position(t)))]
    )
    try:
        trajectory = integrate_ivp(
            rhs,
            frame.flatten(order="F"),
            (0.0, 1.0),
            config,
            t_eval=curve.t,
            projector=projector,
        )
    except DomainExit as exc:
        raise CurveOutsideDomain(f"Curve left the chart at t={exc.t:.9g}") from exc
    return trajectory.y.reshape(-1, count, dim).transpose(0, 2, 1)


def development_residual(development: Development, v: VelocityProfile) -> float:
    """
    Max g-norm of ``gamma'(t_k) - P_0^t v(t_k)``, with ``gamma'`` taken from a
    cubic spline through the sampled points only
    """
    curve = development.curve
    n = development.split.tangent_count
    spline = CubicSpline(curve.t, curve.points, axis=0)
    residual = 0.0
    for index, t in enumerate(curve.t):
        difference = spline(t, 1) - development.frames[index][:, :n] @ v(t)
        residual = max(residual, curve.metric.norm(curve.points[index], difference))
    return residual
