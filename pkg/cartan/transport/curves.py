import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from ..constants import DEFAULT_CURVE_SAMPLES, FD_CURVE_STEP
from ..geometry import FrameSplit, MetricField
from ..geometry.exceptions import DimensionMismatch, OutOfChartDomain
from .exceptions import DegenerateGrid, InvalidProfile

try:
    from functools import cached_property
except ImportError:
    from cached_property import cached_property

logger = logging.getLogger(__name__)

CurveCallback = Callable[[float], np.ndarray]

GRID_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-10
SECOND_DIFFERENCE_STEP = 1e-4
VELOCITY_DIFFERENCE_STEP = 1e-5


def _validate_grid(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.shape[0] < 2:
        raise DegenerateGrid("A curve grid needs at least two samples")
    if not np.all(np.diff(t) > 0):
        raise DegenerateGrid("Curve grid must be strictly increasing")
    if abs(t[0]) > GRID_TOLERANCE or abs(t[-1] - 1.0) > GRID_TOLERANCE:
        raise DegenerateGrid(f"Curve grid must span [0, 1], got [{t[0]}, {t[-1]}]")
    t = t.copy()
    t[0], t[-1] = 0.0, 1.0
    return t


@dataclass(frozen=True, eq=False)
class CurvePath:
    """
    Curve ``gamma: [0, 1] -> M`` sampled on a grid. Positions and derivatives come
    from the analytic callbacks when given, otherwise from a cubic spline through the
    samples (Hermite when sampled velocities are known).
    """

    metric: MetricField
    t: np.ndarray
    points: np.ndarray
    velocities: Optional[np.ndarray] = None
    position_fn: Optional[CurveCallback] = None
    velocity_fn: Optional[CurveCallback] = None
    acceleration_fn: Optional[CurveCallback] = None

    def __post_init__(self):
        t = _validate_grid(self.t)
        points = np.asarray(self.points, dtype=float)
        if points.shape != (t.shape[0], self.metric.dim):
            raise DimensionMismatch(
                f"Expected {t.shape[0]} points of dimension {self.metric.dim}, "
                f"got {points.shape}"
            )
        for index, point in enumerate(points):
            if not self.metric.contains(point):
                raise OutOfChartDomain(
                    f"Curve sample {index} at t={t[index]:.6g} outside of {self.metric.name}",
                    point=point,
                )
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "points", points)
        if self.velocities is not None:
            velocities = np.asarray(self.velocities, dtype=float)
            if velocities.shape != points.shape:
                raise DimensionMismatch("Velocities must match the sampled points")
            object.__setattr__(self, "velocities", velocities)

    @classmethod
    def from_function(
        cls,
        metric: MetricField,
        position: CurveCallback,
        velocity: Optional[CurveCallback] = None,
        acceleration: Optional[CurveCallback] = None,
        samples: int = DEFAULT_CURVE_SAMPLES,
    ) -> "CurvePath":
        t = np.linspace(0.0, 1.0, samples)
        points = np.array([position(value) for value in t], dtype=float)
        velocities = None
        if velocity is not None:
            velocities = np.array([velocity(value) for value in t], dtype=float)
        return cls(
            metric,
            t,
            points,
            velocities=velocities,
            position_fn=position,
            velocity_fn=velocity,
            acceleration_fn=acceleration,
        )

    @classmethod
    def from_samples(
        cls,
        metric: MetricField,
        t: np.ndarray,
        points: np.ndarray,
        velocities: Optional[np.ndarray] = None,
    ) -> "CurvePath":
        return cls(metric, t, points, velocities=velocities)

    @classmethod
    def segment(
        cls,
        metric: MetricField,
        start: np.ndarray,
        end: np.ndarray,
        samples: int = DEFAULT_CURVE_SAMPLES,
    ) -> "CurvePath":
        """
        Straight chart segment from ``start`` to ``end``
        """
        start = np.asarray(start, dtype=float)
        direction = np.asarray(end, dtype=float) - start
        return cls.from_function(
            metric,
            lambda t: start + t * direction,
            velocity=lambda t: direction.copy(),
            acceleration=lambda t: np.zeros_like(direction),
            samples=samples,
        )

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @cached_property
    def _spline(self):
        if self.velocities is not None:
            return CubicHermiteSpline(self.t, self.points, self.velocities, axis=0)
        return CubicSpline(self.t, self.points, axis=0)

    def position(self, t: float) -> np.ndarray:
        if self.position_fn is not None:
            return np.asarray(self.position_fn(t), dtype=float)
        return self._spline(t)

    def velocity(self, t: float) -> np.ndarray:
        if self.velocity_fn is not None:
            return np.asarray(self.velocity_fn(t), dtype=float)
        if self.position_fn is not None:
            return (self.position(t + FD_CURVE_STEP) - self.position(t - FD_CURVE_STEP)) / (
                2.0 * FD_CURVE_STEP
            )
        return self._spline(t, 1)

    def acceleration(self, t: float) -> np.ndarray:
        if self.acceleration_fn is not None:
            return np.asarray(self.acceleration_fn(t), dtype=float)
        if self.velocity_fn is not None:
            return (
                self.velocity(t + VELOCITY_DIFFERENCE_STEP)
                - self.velocity(t - VELOCITY_DIFFERENCE_STEP)
            ) / (
                2.0 * VELOCITY_DIFFERENCE_STEP
            )
        if self.position_fn is not None:
            step = SECOND_DIFFERENCE_STEP
            return (
                self.position(t + step) - 2.0 * self.position(t) + self.position(t - step)
            ) / step ** 2
        return self._spline(t, 2)

    def sampled_velocities(self) -> np.ndarray:
        if self.velocities is not None:
            return self.velocities
        return np.array([self.velocity(value) for value in self.t])

    def reparameterize(
        self,
        rep: Callable[[float], float],
        rep_derivative: Callable[[float], float],
        rep_second_derivative: Optional[Callable[[float], float]] = None,
    ) -> "CurvePath":
        """
        :return: ``gamma o rep`` for a monotone ``rep`` of [0, 1] onto itself
        """
        acceleration = None
        if rep_second_derivative is not None:

            def acceleration(t: float) -> np.ndarray:
                return self.acceleration(rep(t)) * rep_derivative(t) ** 2 + self.velocity(
                    rep(t)
                ) * rep_second_derivative(t)

        return CurvePath.from_function(
            self.metric,
            lambda t: self.position(rep(t)),
            velocity=lambda t: self.velocity(rep(t)) * rep_derivative(t),
            acceleration=acceleration,
            samples=self.t.shape[0],
        )


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    """
    Curve ``v: [0, 1] -> T_pM`` given by its components in a fixed frame at ``p``.
    Sampled profiles are interpolated with a cubic spline.
    """

    base_point: np.ndarray
    frame: np.ndarray
    function: Optional[CurveCallback] = None
    t: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    derivative_fn: Optional[CurveCallback] = None
    transported_frames: Optional[np.ndarray] = None  # (K, n, n) along the source curve

    def __post_init__(self):
        if self.function is None:
            if self.t is None or self.values is None:
                raise InvalidProfile("A velocity profile needs a function or samples")
            t = _validate_grid(self.t)
            values = np.asarray(self.values, dtype=float)
            if values.ndim != 2 or values.shape[0] != t.shape[0]:
                raise InvalidProfile("Velocity samples must be a (K, m) array")
            object.__setattr__(self, "t", t)
            object.__setattr__(self, "values", values)
        object.__setattr__(self, "base_point", np.asarray(self.base_point, dtype=float))
        object.__setattr__(self, "frame", np.asarray(self.frame, dtype=float))

    @classmethod
    def constant(
        cls, base_point: np.ndarray, frame: np.ndarray, components: np.ndarray
    ) -> "VelocityProfile":
        components = np.array(components, dtype=float)
        return cls(
            base_point,
            frame,
            function=lambda t: components.copy(),
            derivative_fn=lambda t: np.zeros_like(components),
        )

    @classmethod
    def from_function(
        cls,
        base_point: np.ndarray,
        frame: np.ndarray,
        function: CurveCallback,
        derivative: Optional[CurveCallback] = None,
    ) -> "VelocityProfile":
        return cls(base_point, frame, function=function, derivative_fn=derivative)

    @classmethod
    def from_samples(
        cls,
        base_point: np.ndarray,
        frame: np.ndarray,
        t: np.ndarray,
        values: np.ndarray,
        transported_frames: Optional[np.ndarray] = None,
    ) -> "VelocityProfile":
        return cls(
            base_point, frame, t=t, values=values, transported_frames=transported_frames
        )

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.t, self.values, axis=0)

    @property
    def size(self) -> int:
        return int(np.asarray(self(0.0)).shape[0])

    def __call__(self, t: float) -> np.ndarray:
        if self.function is not None:
            return np.asarray(self.function(t), dtype=float)
        return self._spline(t)

    def derivative(self, t: float) -> np.ndarray:
        if self.derivative_fn is not None:
            return np.asarray(self.derivative_fn(t), dtype=float)
        if self.function is not None:
            return (self(t + FD_CURVE_STEP) - self(t - FD_CURVE_STEP)) / (2.0 * FD_CURVE_STEP)
        return self._spline(t, 1)

    def vector(self, t: float) -> np.ndarray:
        """
        :return: chart components of ``v(t)`` in T_pM
        """
        components = self(t)
        return self.frame[:, : components.shape[0]] @ components


@dataclass(frozen=True, eq=False)
class HProfile:
    """
    Profile ``t -> h(t)[a, b, alpha]``, symmetric in ``(a, b)``, in the fixed split
    frame at the initial point
    """

    split: FrameSplit
    function: Optional[Callable[[float], np.ndarray]] = None
    t: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        shape = (
            self.split.tangent_count,
            self.split.tangent_count,
            self.split.normal_count,
        )
        if self.function is None:
            if self.t is None or self.values is None:
                raise InvalidProfile("An h profile needs a function or samples")
            t = _validate_grid(self.t)
            values = np.asarray(self.values, dtype=float)
            if values.shape != (t.shape[0],) + shape:
                raise InvalidProfile(
                    f"h samples must have shape (K,) + {shape}, got {values.shape}"
                )
            if values.size and np.max(
                np.abs(values - values.transpose(0, 2, 1, 3))
            ) > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(values)))):
                raise InvalidProfile("h samples must be symmetric in (a, b)")
            object.__setattr__(self, "t", t)
            object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return (
            self.split.tangent_count,
            self.split.tangent_count,
            self.split.normal_count,
        )

    @classmethod
    def zero(cls, split: FrameSplit) -> "HProfile":
        shape = (split.tangent_count, split.tangent_count, split.normal_count)
        return cls(split, function=lambda t: np.zeros(shape))

    @classmethod
    def constant(cls, split: FrameSplit, h: np.ndarray) -> "HProfile":
        h = np.array(h, dtype=float)
        return cls(split, function=lambda t: h.copy())

    @classmethod
    def from_samples(cls, split: FrameSplit, t: np.ndarray, values: np.ndarray) -> "HProfile":
        return cls(split, t=t, values=values)

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.t, self.values, axis=0)

    def __call__(self, t: float) -> np.ndarray:
        if self.function is not None:
            h = np.asarray(self.function(t), dtype=float)
            if h.shape != self.shape:
                raise InvalidProfile(f"h(t) must have shape {self.shape}, got {h.shape}")
            if h.size and np.max(np.abs(h - h.transpose(1, 0, 2))) > SYMMETRY_TOLERANCE * max(
                1.0, float(np.max(np.abs(h)))
            ):
                raise InvalidProfile(f"h({t}) is not symmetric in (a, b)")
        else:
            h = self._spline(t)
        return 0.5 * (h + h.transpose(1, 0, 2))

    def derivative(self, t: float) -> np.ndarray:
        if self.function is not None:
            return (self(t + FD_CURVE_STEP) - self(t - FD_CURVE_STEP)) / (2.0 * FD_CURVE_STEP)
        return self._spline(t, 1)
