"""
Built-in manifolds, submanifolds and bundle data. Every entry carries analytic
derivatives where they are short to write down.
"""
import math
from typing import Optional, Sequence

import numpy as np

from ..geometry import BundleData, ChartBox, MetricField, SubmanifoldSpec

SPHERE_POLE_MARGIN = 0.3
HYPERBOLIC_BOX = ((-5.0, 0.05), (5.0, 20.0))
STRIP_HALF_LENGTH = 5.0
STRIP_WIDTH = 2.0
EUCLIDEAN_HALF_WIDTH = 10.0
LINE_HALF_LENGTH = 5.0

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])


# Manifolds


def euclidean(n: int, half_width: float = EUCLIDEAN_HALF_WIDTH) -> MetricField:
    box = ChartBox(np.full(n, -half_width), np.full(n, half_width))
    return MetricField(
        box,
        components=lambda x: np.eye(n),
        derivative=lambda x: np.zeros((n, n, n)),
        second_derivative=lambda x: np.zeros((n, n, n, n)),
        name=f"euclidean-{n}",
    )


def sphere_chart(radius: float = 1.0, margin: float = SPHERE_POLE_MARGIN) -> MetricField:
    """
    Sphere of ``radius`` in colatitude/longitude ``(theta, phi)``,
    ``g = radius^2 (d theta^2 + sin^2 theta d phi^2)``. The box keeps ``margin``
    away from the poles and covers two turns in ``phi``.
    """
    scale = radius ** 2

    def components(x: np.ndarray) -> np.ndarray:
        return scale * np.diag([1.0, math.sin(x[0]) ** 2])

    def derivative(x: np.ndarray) -> np.ndarray:
        dg = np.zeros((2, 2, 2))
        dg[0, 1, 1] = scale * math.sin(2.0 * x[0])
        return dg

    def second_derivative(x: np.ndarray) -> np.ndarray:
        d2g = np.zeros((2, 2, 2, 2))
        d2g[0, 0, 1, 1] = 2.0 * scale * math.cos(2.0 * x[0])
        return d2g

    box = ChartBox(
        np.array([margin, -2.0 * math.pi]), np.array([math.pi - margin, 2.0 * math.pi])
    )
    return MetricField(
        box,
        components,
        derivative=derivative,
        second_derivative=second_derivative,
        name=f"sphere-{radius:g}",
    )


def hyperbolic_half_plane() -> MetricField:
    """
    Upper half-plane, ``g = (dx^2 + dy^2) / y^2``
    """

    def components(x: np.ndarray) -> np.ndarray:
        return np.eye(2) / x[1] ** 2

    def derivative(x: np.ndarray) -> np.ndarray:
        dg = np.zeros((2, 2, 2))
        dg[1] = -2.0 * np.eye(2) / x[1] ** 3
        return dg

    def second_derivative(x: np.ndarray) -> np.ndarray:
        d2g = np.zeros((2, 2, 2, 2))
        d2g[1, 1] = 6.0 * np.eye(2) / x[1] ** 4
        return d2g

    lower, upper = HYPERBOLIC_BOX
    return MetricField(
        ChartBox(np.array(lower), np.array(upper)),
        components,
        derivative=derivative,
        second_derivative=second_derivative,
        name="hyperbolic",
    )


def flat_strip(
    half_length: float = STRIP_HALF_LENGTH, width: float = STRIP_WIDTH
) -> MetricField:
    metric = euclidean(2)
    return MetricField(
        ChartBox(np.array([-half_length, 0.0]), np.array([half_length, width])),
        metric.components,
        derivative=metric.derivative,
        second_derivative=metric.second_derivative,
        name="flat-strip",
    )


# Submanifolds


def latitude(
    metric: MetricField,
    theta: float,
    lower: float = -math.pi,
    upper: float = math.pi,
    name: Optional[str] = None,
) -> SubmanifoldSpec:
    """
    Circle ``theta = const`` of a sphere chart, parametrized by longitude
    """
    return SubmanifoldSpec(
        metric,
        ChartBox(np.array([lower]), np.array([upper])),
        embedding=lambda u: np.array([theta, u[0]]),
        jacobian=lambda u: np.array([[0.0], [1.0]]),
        hessian=lambda u: np.zeros((2, 1, 1)),
        name=name or f"latitude-{theta:.6g}",
    )


def equator(
    metric: MetricField, lower: float = -math.pi, upper: float = math.pi
) -> SubmanifoldSpec:
    return latitude(metric, math.pi / 2.0, lower, upper, name="equator")


def line(
    metric: MetricField,
    origin: Sequence[float],
    direction: Sequence[float],
    half_length: float = LINE_HALF_LENGTH,
    name: str = "line",
) -> SubmanifoldSpec:
    """
    Chart line ``origin + u direction``, ``|u| <= half_length``
    """
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    n = metric.dim
    return SubmanifoldSpec(
        metric,
        ChartBox(np.array([-half_length]), np.array([half_length])),
        embedding=lambda u: origin + u[0] * direction,
        jacobian=lambda u: direction.reshape(n, 1),
        hessian=lambda u: np.zeros((n, 1, 1)),
        name=name,
    )


def axis_line(metric: MetricField, half_length: float = LINE_HALF_LENGTH) -> SubmanifoldSpec:
    """
    First chart axis
    """
    direction = np.zeros(metric.dim)
    direction[0] = 1.0
    return line(metric, np.zeros(metric.dim), direction, half_length, name="axis")


def boundary_line(metric: MetricField) -> SubmanifoldSpec:
    """
    Lower edge ``y = 0`` of a strip
    """
    half_length = float(metric.box.upper[0])
    return line(metric, [0.0, 0.0], [1.0, 0.0], half_length, name="boundary")


def plane_circle(metric: MetricField, radius: float = 1.0) -> SubmanifoldSpec:
    """
    Circle of ``radius`` in the ``x^1 x^2`` plane of a euclidean chart
    """
    n = metric.dim

    def embedding(u: np.ndarray) -> np.ndarray:
        point = np.zeros(n)
        point[:2] = radius * np.cos(u[0]), radius * np.sin(u[0])
        return point

    def jacobian(u: np.ndarray) -> np.ndarray:
        column = np.zeros((n, 1))
        column[:2, 0] = -radius * np.sin(u[0]), radius * np.cos(u[0])
        return column

    def hessian(u: np.ndarray) -> np.ndarray:
        second = np.zeros((n, 1, 1))
        second[:2, 0, 0] = -radius * np.cos(u[0]), -radius * np.sin(u[0])
        return second

    return SubmanifoldSpec(
        metric,
        ChartBox(np.array([-math.pi]), np.array([math.pi])),
        embedding,
        jacobian=jacobian,
        hessian=hessian,
        name="plane-circle",
    )


# Bundles


def sphere_in_flat_bundle(metric: MetricField, scale: float = 1.0) -> BundleData:
    """
    Rank-1 trivial flat bundle over a sphere chart of radius ``rho`` with
    ``h = scale g / rho``, the normal data of the round sphere in 3-space when
    ``scale = 1``
    """
    radius = math.sqrt(metric.g(metric.box.center)[0, 0])
    factor = scale / radius
    return BundleData(
        metric,
        rank=1,
        fiber_metric=lambda x: np.eye(1),
        connection=lambda x: np.zeros((2, 1, 1)),
        h_tensor=lambda x: factor * metric.g(x)[:, :, None],
        connection_derivative=lambda x: np.zeros((2, 2, 1, 1)),
        h_derivative=lambda x: factor * metric.dg(x)[:, :, :, None],
        fiber_metric_derivative=lambda x: np.zeros((2, 1, 1)),
        name=f"sphere-normal-{scale:g}",
    )


def codazzi_bump_bundle(metric: MetricField, amplitude: float) -> BundleData:
    """
    ``h = (1 + amplitude b(theta)) g`` with a Gaussian bump ``b`` centred on the
    equator; ``D h`` is not symmetric for ``amplitude != 0``
    """

    def bump(theta: float) -> float:
        return math.exp(-((theta - math.pi / 2.0) ** 2) / 0.1)

    return BundleData(
        metric,
        rank=1,
        fiber_metric=lambda x: np.eye(1),
        connection=lambda x: np.zeros((2, 1, 1)),
        h_tensor=lambda x: (1.0 + amplitude * bump(x[0])) * metric.g(x)[:, :, None],
        connection_derivative=lambda x: np.zeros((2, 2, 1, 1)),
        fiber_metric_derivative=lambda x: np.zeros((2, 1, 1)),
        name=f"codazzi-bump-{amplitude:g}",
    )


def flat_bundle(
    metric: MetricField, rank: int, h: Optional[np.ndarray] = None
) -> BundleData:
    """
    Trivial bundle with the product connection and a constant ``h``
    """
    n = metric.dim
    h = np.zeros((n, n, rank)) if h is None else np.asarray(h, dtype=float)
    return BundleData(
        metric,
        rank=rank,
        fiber_metric=lambda x: np.eye(rank),
        connection=lambda x: np.zeros((n, rank, rank)),
        h_tensor=lambda x: h,
        connection_derivative=lambda x: np.zeros((n, n, rank, rank)),
        h_derivative=lambda x: np.zeros((n, n, n, rank)),
        fiber_metric_derivative=lambda x: np.zeros((n, rank, rank)),
        name=f"flat-{rank}",
    )


def ricci_bundle(metric: MetricField, k: float) -> BundleData:
    """
    Rank-2 bundle over a plane with ``D_{d_2} = d_2 + x^1 k J``, so that
    ``R^V(d_1, d_2) = k J``, and ``h`` with non-commuting shape operators
    ``A_1 = diag(1, -1)``, ``A_2 = [[0, 1], [1, 0]]``. The Ricci condition into flat
    space holds exactly for ``k = -2``.
    """
    h = np.zeros((2, 2, 2))
    h[:, :, 0] = np.diag([1.0, -1.0])
    h[:, :, 1] = np.array([[0.0, 1.0], [1.0, 0.0]])

    def connection(x: np.ndarray) -> np.ndarray:
        coefficients = np.zeros((2, 2, 2))
        coefficients[1] = x[0] * k * ROTATION
        return coefficients

    def connection_derivative(x: np.ndarray) -> np.ndarray:
        derivative = np.zeros((2, 2, 2, 2))
        derivative[0, 1] = k * ROTATION
        return derivative

    return BundleData(
        metric,
        rank=2,
        fiber_metric=lambda x: np.eye(2),
        connection=connection,
        h_tensor=lambda x: h,
        connection_derivative=connection_derivative,
        h_derivative=lambda x: np.zeros((2, 2, 2, 2)),
        fiber_metric_derivative=lambda x: np.zeros((2, 2, 2)),
        name=f"ricci-{k:g}",
    )
