import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from ..constants import (
    NEWTON_MAX_ITERATIONS,
    SHOOTING_STEPS_PER_UNIT,
    SHOOTING_TOLERANCE,
)
from ..geometry import GeometryException
from ..integrate import IntegratorConfig
from ..transport import (
    Development,
    DevelopmentNotExisting,
    VelocityProfile,
    bundle_transport,
    develop,
    generalized_develop,
    pullback_h_profile,
)
from .exceptions import AmbiguousNormalGeodesic, InvalidProblem, NewtonNotConverged
from .problem import CahProblem, TransportedIsomorphism

logger = logging.getLogger(__name__)

# Residual returned for shots that leave the chart
SHOT_PENALTY = 1e3
DISTINCT_SOLUTION_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class CartanResult:
    """
    ``f(x)`` from the normal geodesic ``gamma(t) = exp(t c_mu N_mu(u))`` of S reaching
    ``x``, developed on the target with constant ``v = (0, c)``
    """

    parameter: np.ndarray  # u
    normal: np.ndarray  # c, components on the normal part of the adapted frame
    geodesic: Development
    development: Development
    tau: TransportedIsomorphism
    residual: float
    iterations: int

    @property
    def point(self) -> np.ndarray:
        return self.geodesic.endpoint

    @property
    def f_point(self) -> np.ndarray:
        return self.development.endpoint

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.normal))

    @property
    def fiber_map(self) -> np.ndarray:
        return self.tau.fiber


@dataclass(frozen=True)
class _Shot:
    parameter: np.ndarray
    normal: np.ndarray
    residual: float
    iterations: int


def _normal_velocity(problem: CahProblem, u: np.ndarray, normal: np.ndarray):
    frame = problem.source_sub.adapted_frame(u)
    r = problem.source_sub.dim
    components = np.concatenate([np.zeros(r), normal])
    return frame, VelocityProfile.constant(problem.source_sub.point(u), frame, components)


def _shoot(
    problem: CahProblem,
    x: np.ndarray,
    seed: np.ndarray,
    config: IntegratorConfig,
) -> _Shot:
    sub = problem.source_sub
    r = sub.dim

    def residual(unknowns: np.ndarray) -> np.ndarray:
        u, normal = unknowns[:r], unknowns[r:]
        try:
            frame, velocity = _normal_velocity(problem, u, normal)
            geodesic = develop(
                problem.source, sub.point(u), frame, velocity, config, t_eval=[0.0, 1.0]
            )
        except (DevelopmentNotExisting, GeometryException):
            return np.full(problem.dim, SHOT_PENALTY)
        return geodesic.endpoint - x

    lower = np.concatenate([sub.box.lower, np.full(problem.dim - r, -np.inf)])
    upper = np.concatenate([sub.box.upper, np.full(problem.dim - r, np.inf)])
    if np.any(sub.box.upper == sub.box.lower):
        lower, upper = -np.inf, np.inf
    result = least_squares(
        residual,
        np.clip(seed, lower, upper),
        bounds=(lower, upper),
        method="trf",
        max_nfev=NEWTON_MAX_ITERATIONS,
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
    )
    return _Shot(
        parameter=result.x[:r],
        normal=result.x[r:],
        residual=float(np.max(np.abs(result.fun))),
        iterations=int(result.nfev),
    )


def _distinct(problem: CahProblem, shots: List[_Shot]) -> List[_Shot]:
    """
    Shots with different initial points or normal directions
    """
    distinct: List[_Shot] = []
    keys: List[np.ndarray] = []
    for shot in shots:
        frame = problem.source_sub.adapted_frame(shot.parameter)
        key = np.concatenate(
            [
                problem.source_sub.point(shot.parameter),
                frame[:, problem.source_sub.dim :] @ shot.normal,
            ]
        )
        if all(np.linalg.norm(key - other) > DISTINCT_SOLUTION_TOLERANCE for other in keys):
            keys.append(key)
            distinct.append(shot)
    return distinct


def _seeds(problem: CahProblem, x: np.ndarray) -> List[np.ndarray]:
    """
    Nearest point of S with the normal part of ``x - x(u)``, then the opposite normal
    """
    sub = problem.source_sub
    u, _ = sub.project(x)
    base = sub.point(u)
    frame = sub.adapted_frame(u)
    normal = frame[:, sub.dim :].T @ problem.source.g(base) @ (x - base)
    seeds = [np.concatenate([u, normal])]
    if np.any(normal):
        seeds.append(np.concatenate([u, -normal]))
    return seeds


def cartan_normal_map(
    problem: CahProblem,
    x: np.ndarray,
    config: Optional[IntegratorConfig] = None,
    check_uniqueness: bool = True,
) -> CartanResult:
    """
    ``f(x)`` through the normal geodesic from S to ``x``. The geodesic is found by
    shooting on ``(u, c)``; extra seeds look for other normal geodesics reaching
    ``x``.

    :raises InvalidProblem: the problem is not in a Cartan mode
    :raises NewtonNotConverged: no seed converged (``x`` is likely outside Omega)
    :raises AmbiguousNormalGeodesic: several normal geodesics reach ``x``
    """
    if not problem.mode.is_cartan:
        raise InvalidProblem(f"{problem.name}: {problem.mode.value} is not a Cartan mode")
    x = np.asarray(x, dtype=float)
    config = config or IntegratorConfig()
    shooting_config = config.with_steps(SHOOTING_STEPS_PER_UNIT)
    tolerance = SHOOTING_TOLERANCE * max(1.0, float(np.max(np.abs(x))))

    seeds = _seeds(problem, x)
    if not check_uniqueness:
        seeds = seeds[:1]
    shots = []
    best: Optional[_Shot] = None
    for index, seed in enumerate(seeds):
        shot = _shoot(problem, x, seed, shooting_config)
        if best is None or shot.residual < best.residual:
            best = shot
        if shot.residual <= tolerance:
            shots.append(shot)
        elif index:
            logger.warning(
                "%s: seed %d for %s discarded, residual %.3e",
                problem.name,
                index,
                x,
                shot.residual,
            )

    solutions = _distinct(problem, shots)
    if not solutions:
        raise NewtonNotConverged(
            f"{problem.name}: no normal geodesic reaches {x}, residual {best.residual:.3e}",
            residual=best.residual,
            iterations=best.iterations,
        )
    if len(solutions) > 1:
        raise AmbiguousNormalGeodesic(
            f"{problem.name}: {len(solutions)} normal geodesics reach {x}",
            solutions=[
                np.concatenate([shot.parameter, shot.normal]) for shot in solutions
            ],
        )
    shot = solutions[0]
    result = _develop_normal(problem, shot, config)
    logger.info(
        "%s: Cartan map f(%s) = %s after %d evaluations",
        problem.name,
        x,
        result.f_point,
        shot.iterations,
    )
    return result


def _develop_normal(
    problem: CahProblem, shot: _Shot, config: IntegratorConfig
) -> CartanResult:
    u = shot.parameter
    frame, fiber_frame = problem.initial_frames(u)
    _, velocity = _normal_velocity(problem, u, shot.normal)
    geodesic = develop(problem.source, problem.source_sub.point(u), frame, velocity, config)
    point, target_frame = problem.target_lift()(u, frame, fiber_frame)
    target_velocity = VelocityProfile.constant(point, target_frame, velocity(0.0))

    if problem.rank:
        bundle = problem.working_bundle
        fiber_frames = bundle_transport(bundle, geodesic.curve, fiber_frame, config)
        h = pullback_h_profile(bundle, geodesic.curve, geodesic.frames, fiber_frames)
        development = generalized_develop(
            problem.target,
            point,
            target_frame,
            problem.split,
            target_velocity,
            h,
            config,
            t_eval=geodesic.t,
        )
        final_fiber = fiber_frames[-1]
    else:
        development = develop(
            problem.target, point, target_frame, target_velocity, config, t_eval=geodesic.t
        )
        final_fiber = np.zeros((0, 0))

    tau = problem.transported_isomorphism(
        geodesic.endpoint, geodesic.final_frame, final_fiber, development
    )
    return CartanResult(
        parameter=u,
        normal=shot.normal,
        geodesic=geodesic,
        development=development,
        tau=tau,
        residual=shot.residual,
        iterations=shot.iterations,
    )


def normal_coordinates(
    problem: CahProblem, x: np.ndarray, config: Optional[IntegratorConfig] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    :return: ``(u, c)`` of the normal geodesic from S reaching ``x``
    """
    result = cartan_normal_map(problem, x, config)
    return result.parameter, result.normal
