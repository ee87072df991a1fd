import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..constants import EXIT_TIME_TOLERANCE
from ..geometry.exceptions import OutOfChartDomain
from .config import IntegrationMethod, IntegratorConfig, ReorthoPolicy
from .exceptions import DomainExit, IntegrationException, StepSizeUnderflow
from .frames import StateProjector

logger = logging.getLogger(__name__)

RightHandSide = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray  # (K,)
    y: np.ndarray  # (K, dim)
    steps: int = 0
    reorthonormalizations: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]


def rk4_step(rhs: RightHandSide, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _evaluation_grid(
    t0: float, t1: float, config: IntegratorConfig, t_eval: Optional[Sequence[float]]
) -> np.ndarray:
    if t_eval is None:
        return np.linspace(t0, t1, config.step_count(t1 - t0) + 1)
    grid = np.asarray(t_eval, dtype=float)
    if grid.ndim != 1 or grid.shape[0] < 1:
        raise IntegrationException("t_eval must be a non empty vector")
    if not np.isclose(grid[0], t0, rtol=0, atol=1e-12) or not np.isclose(
        grid[-1], t1, rtol=0, atol=1e-12
    ):
        raise IntegrationException(f"t_eval must span [{t0}, {t1}]")
    direction = np.sign(t1 - t0)
    if grid.shape[0] > 1 and not np.all(direction * np.diff(grid) > 0):
        raise IntegrationException("t_eval must be strictly monotone along t_span")
    grid = grid.copy()
    grid[0], grid[-1] = t0, t1
    return grid


def integrate_ivp(
    rhs: RightHandSide,
    y0: np.ndarray,
    t_span: Sequence[float],
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
    projector: Optional[StateProjector] = None,
) -> Trajectory:
    """
    Integrate ``y' = rhs(t, y)`` and sample the solution on ``t_eval``.

    Fixed-step RK4 places ``ceil(steps * |dt|)`` equal steps between consecutive
    evaluation times, so the result is bit-identical on repeated runs.

    :param projector: frame blocks of the state, re-orthonormalized following
        ``config.reortho_policy`` (fixed-step mode only)
    :raises DomainExit: ``rhs`` left the chart domain
    :raises StepSizeUnderflow: adaptive step size collapsed
    """
    config = config or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    y0 = np.array(y0, dtype=float)
    grid = _evaluation_grid(t0, t1, config, t_eval)
    if t0 == t1:
        return Trajectory(t=np.array([t0]), y=y0[np.newaxis, :].copy())
    if config.method is IntegrationMethod.RK45:
        return _integrate_adaptive(rhs, y0, t0, t1, grid, config)
    return _integrate_fixed(rhs, y0, grid, config, projector)


def _bracket_exit(
    rhs: RightHandSide, t: float, y: np.ndarray, h: float, tolerance: float
) -> float:
    """
    Bisect the failing step ``[t, t + h]`` on its length until the longest step that
    stays inside the chart is known to ``tolerance``.

    :return: last parameter reached inside the chart
    """
    inside, outside = 0.0, h
    while abs(outside - inside) > tolerance:
        middle = 0.5 * (inside + outside)
        try:
            rk4_step(rhs, t, y, middle)
        except OutOfChartDomain:
            outside = middle
        else:
            inside = middle
    return t + inside


def _integrate_fixed(
    rhs: RightHandSide,
    y0: np.ndarray,
    grid: np.ndarray,
    config: IntegratorConfig,
    projector: Optional[StateProjector],
) -> Trajectory:
    times: List[float] = [float(grid[0])]
    states: List[np.ndarray] = [y0.copy()]
    y = y0
    t = float(grid[0])
    step_counter = 0
    reorthonormalizations = 0
    check_frames = projector is not None and config.reortho_policy is not ReorthoPolicy.NEVER

    for target in grid[1:]:
        start = t
        substeps = config.step_count(target - start)
        h = (target - start) / substeps
        for substep in range(substeps):
            try:
                y = rk4_step(rhs, t, y, h)
            except OutOfChartDomain as exc:
                exit_time = _bracket_exit(rhs, t, y, h, EXIT_TIME_TOLERANCE)
                raise DomainExit(
                    f"State left the chart domain after t={exit_time:.9g}: {exc}",
                    t=exit_time,
                    times=np.array(times),
                    states=np.array(states),
                ) from exc
            if not np.all(np.isfinite(y)):
                raise IntegrationException(f"Non finite state after t={t:.9g}")
            step_counter += 1
            t = start + (substep + 1) * h
            if check_frames and step_counter % config.reortho_every == 0:
                if (
                    config.reortho_policy is ReorthoPolicy.EVERY
                    or projector.drift(t, y) > config.tau
                ):
                    y = projector.project(t, y)
                    reorthonormalizations += 1
        t = float(target)
        times.append(t)
        states.append(y.copy())

    if reorthonormalizations:
        logger.debug(
            "%d re-orthonormalizations in %d steps", reorthonormalizations, step_counter
        )
    return Trajectory(
        t=np.array(times),
        y=np.array(states),
        steps=step_counter,
        reorthonormalizations=reorthonormalizations,
    )


def _integrate_adaptive(
    rhs: RightHandSide,
    y0: np.ndarray,
    t0: float,
    t1: float,
    grid: np.ndarray,
    config: IntegratorConfig,
) -> Trajectory:
    reached = [t0]

    def tracked_rhs(t: float, y: np.ndarray) -> np.ndarray:
        value = rhs(t, y)
        if abs(t - t0) > abs(reached[0] - t0):
            reached[0] = t
        return value

    try:
        solution = solve_ivp(
            tracked_rhs,
            (t0, t1),
            y0,
            method="RK45",
            t_eval=grid,
            rtol=config.rel_tol,
            atol=config.abs_tol,
        )
    except OutOfChartDomain as exc:
        raise DomainExit(
            f"State left the chart domain after t={reached[0]:.9g}: {exc}",
            t=reached[0],
        ) from exc
    if solution.status == -1:
        if "step size" in solution.message.lower():
            raise StepSizeUnderflow(solution.message)
        raise IntegrationException(solution.message)
    return Trajectory(t=solution.t, y=solution.y.T, steps=int(solution.nfev))
