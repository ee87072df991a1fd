"""
Closed forms and an independent geodesic integrator. Nothing here goes through the
development or transport solvers.
"""
import logging
import math

import numpy as np
from scipy.integrate import solve_ivp

from ..geometry import MetricField
from ..geometry.exceptions import OutOfChartDomain
from .exceptions import OracleDomainError

logger = logging.getLogger(__name__)

GEODESIC_TOLERANCE = 1e-12


def oracle_holonomy_sphere(theta0: float) -> float:
    """
    Angle deficit ``2 pi (1 - cos theta0)`` of parallel transport once around the
    latitude circle at colatitude ``theta0`` of the unit sphere.

    Sign convention: walking the circle with increasing longitude, a transported
    vector ends rotated by this angle, modulo ``2 pi``, in the orientation of the
    orthonormal frame ``(d_theta, d_phi / sin theta)``.

    :raises OracleDomainError: ``theta0`` outside ``(0, pi)``
    """
    if not 0.0 < theta0 < math.pi:
        raise OracleDomainError(f"Colatitude {theta0} outside (0, pi)")
    return 2.0 * math.pi * (1.0 - math.cos(theta0))


def rotation_matrix(angle: float) -> np.ndarray:
    cos, sin = math.cos(angle), math.sin(angle)
    return np.array([[cos, -sin], [sin, cos]])


def _christoffel(metric: MetricField, x: np.ndarray) -> np.ndarray:
    g = metric.g(x)
    dg = metric.dg(x)
    lowered = 0.5 * (
        np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    )
    return np.linalg.solve(g, lowered.reshape(g.shape[0], -1)).reshape(lowered.shape)


def oracle_geodesic(
    metric: MetricField, p: np.ndarray, w: np.ndarray, t: float
) -> np.ndarray:
    """
    ``exp_p(t w)`` from the second-order geodesic equation, integrated with DOP853

    :raises OracleDomainError: the geodesic leaves the chart box before ``t``
    """
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    n = p.shape[0]
    box = metric.box

    reached = [0.0]

    def rhs(s: float, state: np.ndarray) -> np.ndarray:
        x, v = state[:n], state[n:]
        gamma = _christoffel(metric, x)
        if abs(s) > abs(reached[0]):
            reached[0] = s
        return np.concatenate([v, -np.einsum("abc,b,c->a", gamma, v, v)])

    def exit_event(_: float, state: np.ndarray) -> float:
        x = state[:n]
        return float(min(np.min(x - box.lower), np.min(box.upper - x)))

    exit_event.terminal = True  # type: ignore[attr-defined]
    exit_event.direction = -1  # type: ignore[attr-defined]

    if t == 0.0:
        return p.copy()
    try:
        solution = solve_ivp(
            rhs,
            (0.0, t),
            np.concatenate([p, w]),
            method="DOP853",
            rtol=GEODESIC_TOLERANCE,
            atol=GEODESIC_TOLERANCE,
            events=exit_event,
        )
    except OutOfChartDomain as exc:
        # a trial stage left the box before the exit event fired
        raise OracleDomainError(
            f"Geodesic from {p} along {w} leaves {metric.name} after t={reached[0]:.6g}",
            t=reached[0],
        ) from exc
    if solution.status == 1:
        exit_time = float(solution.t[-1])
        raise OracleDomainError(
            f"Geodesic from {p} along {w} leaves {metric.name} at t={exit_time:.6g}",
            t=exit_time,
        )
    if not solution.success:
        raise OracleDomainError(f"Geodesic oracle failed: {solution.message}")
    logger.debug("Geodesic oracle used %d evaluations", solution.nfev)
    return solution.y[:n, -1]


def oracle_sphere_embedding(point: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """
    ``(theta, phi) -> radius (sin theta cos phi, sin theta sin phi, cos theta)``
    """
    theta, phi = float(point[0]), float(point[1])
    return radius * np.array(
        [
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        ]
    )


def oracle_great_circle(theta0: float, phi0: float, heading: float, t: float) -> np.ndarray:
    """
    Point of 3-space reached by the unit-speed great circle leaving ``(theta0, phi0)``
    at angle ``heading`` from ``-d_theta`` (north) towards ``d_phi``
    """
    start = oracle_sphere_embedding((theta0, phi0))
    north = -np.array(
        [
            math.cos(theta0) * math.cos(phi0),
            math.cos(theta0) * math.sin(phi0),
            -math.sin(theta0),
        ]
    )
    east = np.array([-math.sin(phi0), math.cos(phi0), 0.0])
    direction = math.cos(heading) * north + math.sin(heading) * east
    return math.cos(t) * start + math.sin(t) * direction


def oracle_hyperbolic_vertical(point: np.ndarray, t: float, upward: bool = True) -> np.ndarray:
    """
    Unit-speed vertical geodesic of the half-plane, ``(x0, y0 e^{+-t})``
    """
    sign = 1.0 if upward else -1.0
    return np.array([float(point[0]), float(point[1]) * math.exp(sign * t)])


def oracle_rotation(point: np.ndarray, beta: float) -> np.ndarray:
    """
    Rotation by ``beta`` about the polar axis in sphere chart coordinates
    """
    return np.array([float(point[0]), float(point[1]) + beta])


def oracle_plane_rotation(point: np.ndarray, beta: float) -> np.ndarray:
    return rotation_matrix(beta) @ np.asarray(point, dtype=float)
