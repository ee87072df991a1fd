import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import DEFAULT_CURVE_SAMPLES, DEFAULT_WELL_DEFINED_TOLERANCE
from ..geometry import OutOfChartDomain
from ..integrate import IntegratorConfig
from ..transport import (
    CurveOutsideDomain,
    CurvePath,
    Development,
    anti_develop,
    bundle_transport,
    develop,
    generalized_develop,
    pullback_h_profile,
)
from ..typing import DriftReportDict, ReconstructionDict
from ..variation import Homotopy
from .exceptions import InvalidPath, PathExitsDomain
from .problem import CahProblem, TransportedIsomorphism

logger = logging.getLogger(__name__)

PUSHFORWARD_STEP = 1e-4
HESSIAN_STEP = 1e-3
WELL_DEFINED_SLICES = 9


class PathStrategy(Enum):
    STRAIGHT_LINE = "straight-line"
    USER_CURVE = "user-curve"


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """
    ``f(gamma(1))`` with the curves it was built from and ``tau_gamma``. In immersion
    modes ``fiber_map`` is ``f~ = tau_gamma|_V``.
    """

    parameter: np.ndarray  # S parameters of gamma(0)
    curve: CurvePath
    development: Development
    tau: TransportedIsomorphism
    source_frame: np.ndarray  # E_a(1), parallel along gamma
    fiber_frame: np.ndarray  # F_alpha(1), D-parallel along gamma
    snap_distance: float = 0.0

    @property
    def point(self) -> np.ndarray:
        return self.curve.end

    @property
    def f_point(self) -> np.ndarray:
        return self.development.endpoint

    @property
    def target_curve(self) -> CurvePath:
        return self.development.curve

    @property
    def fiber_map(self) -> np.ndarray:
        return self.tau.fiber

    def to_dict(self) -> ReconstructionDict:
        return {
            "point": self.point.tolist(),
            "f_point": self.f_point.tolist(),
            "tau_matrix": self.tau.matrix.tolist(),
            "diagnostics": {
                "snap_distance": self.snap_distance,
                "isometry_defect": self.tau.isometry_defect(),
                "gram_drift": self.development.max_gram_drift(),
                "steps": float(self.development.steps),
            },
        }


@dataclass(frozen=True, eq=False)
class DriftReport:
    drift: float
    tolerance: float
    u_values: np.ndarray
    endpoints: np.ndarray  # (len(u_values), N)

    @property
    def passed(self) -> bool:
        return self.drift < self.tolerance

    def to_dict(self) -> DriftReportDict:
        return {
            "drift": self.drift,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "u_values": self.u_values.tolist(),
            "endpoints": self.endpoints.tolist(),
        }


@dataclass(frozen=True, eq=False)
class SecondFormComparison:
    """
    ``h_M~(f_* d_a, f_* d_b)`` from finite differences of ``f`` against
    ``f~(h(d_a, d_b))``, both as chart vectors at ``f(x)``
    """

    point: np.ndarray
    pulled: np.ndarray  # (n, n, N)
    expected: np.ndarray  # (n, n, N)

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.pulled - self.expected)))


def _snapped_curve(
    problem: CahProblem, curve: CurvePath
) -> Tuple[np.ndarray, CurvePath, float]:
    """
    Moves ``gamma(0)`` onto S, fading the correction out linearly in ``t``
    """
    parameter, distance = problem.snap(curve.start)
    offset = problem.source_sub.point(parameter) - curve.start
    if not np.any(offset):
        return parameter, curve, distance
    weights = 1.0 - curve.t
    velocities = None
    if curve.velocities is not None:
        velocities = curve.velocities - offset
    snapped = CurvePath(
        curve.metric,
        curve.t,
        curve.points + weights[:, None] * offset,
        velocities=velocities,
        position_fn=lambda t: curve.position(t) + (1.0 - t) * offset,
        velocity_fn=lambda t: curve.velocity(t) - offset,
        acceleration_fn=curve.acceleration,
    )
    logger.debug("Snapped curve start onto %s (%.3e)", problem.source_sub.name, distance)
    return parameter, snapped, distance


def reconstruct_along(
    problem: CahProblem, curve: CurvePath, config: Optional[IntegratorConfig] = None
) -> Reconstruction:
    """
    ``f(gamma(1)) = gamma~(1)``: anti-develop ``gamma`` in the adapted frame at
    ``gamma(0)``, map the initial frames with ``psi~`` (and ``psi`` on V) and develop
    the same components on the target. In immersion modes the development is the
    generalized one with ``h`` pulled back along ``gamma``.

    :raises NotOnSubmanifold: ``gamma(0)`` is not on S
    :raises DevelopmentNotExisting: ``gamma~`` leaves the target chart
    """
    parameter, curve, distance = _snapped_curve(problem, curve)
    frame, fiber_frame = problem.initial_frames(parameter)
    velocity = anti_develop(curve, frame, config)
    point, target_frame = problem.target_lift()(parameter, frame, fiber_frame)

    if problem.rank:
        bundle = problem.working_bundle
        fiber_frames = bundle_transport(bundle, curve, fiber_frame, config)
        h = pullback_h_profile(bundle, curve, velocity.transported_frames, fiber_frames)
        development = generalized_develop(
            problem.target,
            point,
            target_frame,
            problem.split,
            velocity,
            h,
            config,
            t_eval=curve.t,
        )
        final_fiber = fiber_frames[-1]
    else:
        development = develop(
            problem.target, point, target_frame, velocity, config, t_eval=curve.t
        )
        final_fiber = np.zeros((0, 0))

    tau = problem.transported_isomorphism(
        curve.end, velocity.transported_frames[-1], final_fiber, development
    )
    logger.info(
        "%s: reconstructed f(%s) = %s", problem.name, curve.end, development.endpoint
    )
    return Reconstruction(
        parameter=parameter,
        curve=curve,
        development=development,
        tau=tau,
        source_frame=velocity.transported_frames[-1],
        fiber_frame=final_fiber,
        snap_distance=distance,
    )


def straight_line_path(
    problem: CahProblem, x: np.ndarray, samples: int = DEFAULT_CURVE_SAMPLES
) -> CurvePath:
    """
    Chart segment from the nearest point of S to ``x``

    :raises PathExitsDomain: the segment leaves the source chart
    """
    x = np.asarray(x, dtype=float)
    parameter, _ = problem.source_sub.project(x)
    start = problem.source_sub.point(parameter)
    try:
        return CurvePath.segment(problem.source, start, x, samples=samples)
    except OutOfChartDomain as exc:
        raise PathExitsDomain(
            f"{problem.name}: straight line from {start} to {x} leaves {problem.source.name}"
        ) from exc


def reconstruct_map(
    problem: CahProblem,
    x: np.ndarray,
    strategy: PathStrategy = PathStrategy.STRAIGHT_LINE,
    curve: Optional[CurvePath] = None,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> Reconstruction:
    """
    :param strategy: straight chart segment from the nearest point of S, or ``curve``
    :raises PathExitsDomain: the straight line leaves the chart
    :raises InvalidPath: the user curve does not end at ``x``
    """
    x = np.asarray(x, dtype=float)
    if strategy is PathStrategy.USER_CURVE:
        if curve is None:
            raise InvalidPath("A user curve is needed for the user-curve strategy")
        if np.linalg.norm(curve.end - x) > 1e-9:
            raise InvalidPath(f"Curve ends at {curve.end}, not at {x}")
        return reconstruct_along(problem, curve, config)

    path = straight_line_path(problem, x, samples)
    try:
        return reconstruct_along(problem, path, config)
    except CurveOutsideDomain as exc:
        raise PathExitsDomain(f"{problem.name}: straight line to {x} leaves the chart") from exc


def reconstruct_points(
    problem: CahProblem,
    points: Sequence[np.ndarray],
    threads: int = 1,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> List[Reconstruction]:
    """
    Straight-line reconstructions of ``points``, in input order
    """
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(
            executor.map(
                lambda x: reconstruct_map(problem, x, samples=samples, config=config),
                points,
            )
        )


def well_definedness(
    problem: CahProblem,
    homotopy: Homotopy,
    u_values: Optional[Sequence[float]] = None,
    tolerance: float = DEFAULT_WELL_DEFINED_TOLERANCE,
    samples: int = DEFAULT_CURVE_SAMPLES,
    threads: int = 1,
    config: Optional[IntegratorConfig] = None,
) -> DriftReport:
    """
    Reconstructs ``f(Phi(u, 1))`` along every slice and reports the largest chart
    distance to the ``u = 0`` endpoint
    """
    if u_values is None:
        u_values = np.linspace(0.0, 1.0, WELL_DEFINED_SLICES)
    u_values = np.asarray(u_values, dtype=float)

    def endpoint(u: float) -> np.ndarray:
        return reconstruct_along(problem, homotopy.slice(u, samples), config).f_point

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        endpoints = np.array(list(executor.map(endpoint, u_values)))
    drift = float(np.max(np.linalg.norm(endpoints - endpoints[0], axis=1)))
    report = DriftReport(
        drift=drift, tolerance=tolerance, u_values=u_values, endpoints=endpoints
    )
    if report.passed:
        logger.info("%s: %s drift %.3e", problem.name, homotopy.name, drift)
    else:
        logger.warning(
            "%s: %s drift %.3e above tolerance %.1e",
            problem.name,
            homotopy.name,
            drift,
            tolerance,
        )
    return report


def pushforward(
    problem: CahProblem,
    x: np.ndarray,
    w: np.ndarray,
    step: float = PUSHFORWARD_STEP,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> np.ndarray:
    """
    ``f_* w`` at ``x`` by central differences of straight-line reconstructions
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    forward = reconstruct_map(problem, x + step * w, samples=samples, config=config)
    backward = reconstruct_map(problem, x - step * w, samples=samples, config=config)
    return (forward.f_point - backward.f_point) / (2.0 * step)


def pushforward_ratio(
    problem: CahProblem,
    x: np.ndarray,
    w: np.ndarray,
    step: float = PUSHFORWARD_STEP,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> float:
    """
    ``|f_* w| / |w|``, equal to 1 for an isometric immersion
    """
    x = np.asarray(x, dtype=float)
    image = pushforward(problem, x, w, step, samples, config)
    f_point = reconstruct_map(problem, x, samples=samples, config=config).f_point
    return problem.target.norm(f_point, image) / problem.source.norm(x, np.asarray(w, float))


def pulled_back_second_fundamental_form(
    problem: CahProblem,
    x: np.ndarray,
    step: float = HESSIAN_STEP,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> SecondFormComparison:
    """
    Second fundamental form of the reconstructed immersion ``f`` at ``x`` (normal
    part of ``d_a d_b f + Gamma~(d_a f, d_b f)``) against ``f~ h``
    """
    x = np.asarray(x, dtype=float)
    n = problem.dim
    axes = np.eye(n) * step

    def f(point: np.ndarray) -> np.ndarray:
        return reconstruct_map(problem, point, samples=samples, config=config).f_point

    center = reconstruct_map(problem, x, samples=samples, config=config)
    image = center.f_point
    jacobian = np.stack(
        [(f(x + axes[a]) - f(x - axes[a])) / (2.0 * step) for a in range(n)], axis=1
    )
    hessian = np.zeros((n, n, image.shape[0]))
    for a in range(n):
        for b in range(a, n):
            value = (
                f(x + axes[a] + axes[b])
                - f(x + axes[a] - axes[b])
                - f(x - axes[a] + axes[b])
                + f(x - axes[a] - axes[b])
            ) / (4.0 * step ** 2)
            hessian[a, b] = hessian[b, a] = value

    g = problem.target.g(image)
    acceleration = hessian + np.einsum(
        "kpq,pa,qb->abk", problem.target.christoffel(image), jacobian, jacobian
    )
    tangent = jacobian @ np.linalg.solve(jacobian.T @ g @ jacobian, jacobian.T @ g)
    normal = np.eye(image.shape[0]) - tangent
    pulled = np.einsum("kl,abl->abk", normal, acceleration)

    if problem.rank:
        expected = np.einsum(
            "kc,abc->abk", center.fiber_map, problem.bundle.h_at(x)
        )
    else:
        expected = np.zeros_like(pulled)
    return SecondFormComparison(point=x, pulled=pulled, expected=expected)


def normal_pushforward_residual(
    problem: CahProblem,
    u: np.ndarray,
    step: float = PUSHFORWARD_STEP,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> float:
    """
    Largest relative error of ``f_* nu = psi(nu)`` over the normal columns ``nu`` of the
    adapted frame at ``x(u)``
    """
    u = np.asarray(u, dtype=float)
    x = problem.source_sub.point(u)
    frame = problem.source_sub.adapted_frame(u)
    expected = problem.psi_tilde(u)
    residual = 0.0
    for column in range(problem.source_sub.dim, problem.dim):
        normal = frame[:, column]
        image = pushforward(problem, x, normal, step, samples, config)
        target = expected @ normal
        residual = max(
            residual,
            float(np.linalg.norm(image - target) / max(np.linalg.norm(target), 1e-300)),
        )
    return residual


def restriction_residual(
    problem: CahProblem,
    u: np.ndarray,
    samples: int = DEFAULT_CURVE_SAMPLES,
    config: Optional[IntegratorConfig] = None,
) -> float:
    """
    ``|f(x(u)) - phi(x(u))|`` in target chart units
    """
    u = np.asarray(u, dtype=float)
    reconstruction = reconstruct_map(
        problem, problem.source_sub.point(u), samples=samples, config=config
    )
    return float(np.linalg.norm(reconstruction.f_point - problem.target_point(u)))
