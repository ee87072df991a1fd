import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..geometry import FrameSplit, frame_components
from ..geometry.exceptions import DimensionMismatch
from ..geometry.linalg import antisymmetric_from_upper, upper_from_antisymmetric
from ..integrate import DomainExit, IntegratorConfig, integrate_ivp
from ..transport import DevelopmentNotExisting, h_components
from .exceptions import GridMismatch, VariationException
from .family import FamilyInput

logger = logging.getLogger(__name__)

REDUCTION_TOLERANCE = 1e-6
GRID_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class VariationStage:
    """
    Integrator stage handed to curvature overrides
    """

    u: float
    t: float
    point: np.ndarray
    frame: np.ndarray
    fiber_frame: np.ndarray
    velocity: np.ndarray  # v_a(u, t)
    target_point: Optional[np.ndarray] = None
    target_frame: Optional[np.ndarray] = None


CurvatureOverride = Callable[[VariationStage], np.ndarray]


@dataclass(frozen=True, eq=False)
class VariationState:
    t: float
    U: np.ndarray
    U_prime: np.ndarray
    X_upper: np.ndarray

    @property
    def size(self) -> int:
        return self.U.shape[0]

    @property
    def X(self) -> np.ndarray:
        return antisymmetric_from_upper(self.X_upper, self.size)


@dataclass(frozen=True, eq=False)
class VariationTrajectory:
    """
    Solution ``U_A(u, t)``, ``U'_A(u, t)``, ``X_AB(u, t)`` of one variation system on a
    t-grid, with the source data it was solved along. ``X`` is stored as its strictly
    upper part, row-major.
    """

    u: float
    t: np.ndarray
    split: FrameSplit
    U: np.ndarray  # (K, N)
    U_prime: np.ndarray  # (K, N)
    X_upper: np.ndarray  # (K, N(N-1)/2)
    points: np.ndarray  # (K, n), gamma_u(t)
    frames: np.ndarray  # (K, n, n)
    fiber_frames: np.ndarray  # (K, s, s)
    fiber_upper: Optional[np.ndarray] = None  # isometry system with a bundle
    h: Optional[np.ndarray] = None  # (K, n, n, s)
    target_points: Optional[np.ndarray] = None
    target_frames: Optional[np.ndarray] = None
    steps: int = 0

    @property
    def size(self) -> int:
        return self.split.total

    @property
    def rank(self) -> int:
        return self.fiber_frames.shape[-1]

    @property
    def X(self) -> np.ndarray:
        return antisymmetric_from_upper(self.X_upper, self.size)

    @property
    def fiber_X(self) -> Optional[np.ndarray]:
        if self.fiber_upper is None:
            return None
        return antisymmetric_from_upper(self.fiber_upper, self.rank)

    def state(self, index: int) -> VariationState:
        return VariationState(
            t=float(self.t[index]),
            U=self.U[index],
            U_prime=self.U_prime[index],
            X_upper=self.X_upper[index],
        )

    def states(self) -> List[VariationState]:
        return [self.state(index) for index in range(self.t.shape[0])]

    def rows(self) -> np.ndarray:
        """
        ``(u, t, U_A, X_AB for A < B)`` per grid point
        """
        count = self.t.shape[0]
        return np.concatenate(
            [np.full((count, 1), self.u), self.t[:, np.newaxis], self.U, self.X_upper],
            axis=1,
        )

    def header(self) -> List[str]:
        rows, columns = np.triu_indices(self.size, k=1)
        return (
            ["u", "t"]
            + [f"U_{index + 1}" for index in range(self.size)]
            + [f"X_{row + 1}_{column + 1}" for row, column in zip(rows, columns)]
        )


@dataclass(frozen=True, eq=False)
class _SliceData:
    point: np.ndarray
    frame: np.ndarray
    fiber_frame: np.ndarray
    v: np.ndarray
    vt: np.ndarray
    vu: np.ndarray
    vut: np.ndarray
    h: np.ndarray  # (n, n, s)
    ht: np.ndarray
    hu: np.ndarray

    def mixing(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        ``K[i, alpha] = v_b h_bi^alpha`` with its t- and u-derivatives
        """
        mixing = np.einsum("b,bia->ia", self.v, self.h)
        mixing_t = np.einsum("b,bia->ia", self.vt, self.h) + np.einsum(
            "b,bia->ia", self.v, self.ht
        )
        mixing_u = np.einsum("b,bia->ia", self.vu, self.h) + np.einsum(
            "b,bia->ia", self.v, self.hu
        )
        return mixing, mixing_t, mixing_u


class _SourceSlices:
    """
    Parallel frames (and D-parallel fiber frames) along ``gamma_u`` and
    ``gamma_{u +- delta}``, integrated inside the variation state. ``v`` and its
    u-derivatives are read off them at every stage.
    """

    def __init__(self, family: FamilyInput, with_h_rate: bool = False):
        self.family = family
        self.metric = family.homotopy.metric
        self.bundle = family.bundle
        self.n = family.dim
        self.s = family.rank
        self.block = self.n * self.n + self.s * self.s
        self.size = 3 * self.block
        self.parameters = (family.u, family.u + family.delta, family.u - family.delta)
        self.with_h_rate = with_h_rate

    def initial(self) -> np.ndarray:
        frames = [
            (self.family.frame, self.family.fiber_frame),
            self.family.forward_frames,
            self.family.backward_frames,
        ]
        return np.concatenate(
            [
                np.concatenate([frame.flatten(order="F"), fiber.flatten(order="F")])
                for frame, fiber in frames
            ]
        )

    def frames(self, state: np.ndarray, index: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        n, s = self.n, self.s
        start = index * self.block
        frame = state[start : start + n * n].reshape((n, n), order="F")
        fiber = state[start + n * n : start + self.block].reshape((s, s), order="F")
        return frame, fiber

    def h_at(self, x: np.ndarray, frame: np.ndarray, fiber: np.ndarray) -> np.ndarray:
        if not self.s:
            return np.zeros((self.n, self.n, 0))
        return h_components(self.bundle, x, frame, fiber)

    def evaluate(self, t: float, state: np.ndarray) -> Tuple[np.ndarray, _SliceData]:
        homotopy = self.family.homotopy
        derivatives = []
        samples = []
        for index, u in enumerate(self.parameters):
            frame, fiber = self.frames(state, index)
            x = homotopy.point(u, t)
            tangent = homotopy.tangent(u, t)
            gamma = self.metric.christoffel(x)
            acceleration = homotopy.second_derivative(u, t) + np.einsum(
                "abc,b,c->a", gamma, tangent, tangent
            )
            derivatives.append(
                (-np.einsum("abc,b,cm->am", gamma, tangent, frame)).flatten(order="F")
            )
            if self.s:
                connection = self.bundle.connection_at(x)
                derivatives.append(
                    (-np.einsum("c,cab,bm->am", tangent, connection, fiber)).flatten(
                        order="F"
                    )
                )
            samples.append(
                (
                    x,
                    tangent,
                    frame,
                    fiber,
                    np.linalg.solve(frame, tangent),
                    np.linalg.solve(frame, acceleration),
                    self.h_at(x, frame, fiber),
                )
            )

        delta = self.family.delta
        x, tangent, frame, fiber, v, vt, h = samples[0]
        ht = np.zeros_like(h)
        if self.s and self.with_h_rate:
            ht = np.einsum(
                "cpqx,c,pa,qb,xy,yg->abg",
                self.bundle.h_covariant_derivative(x),
                tangent,
                frame,
                frame,
                self.bundle.metric_at(x),
                fiber,
            )
        data = _SliceData(
            point=x,
            frame=frame,
            fiber_frame=fiber,
            v=v,
            vt=vt,
            vu=(samples[1][4] - samples[2][4]) / (2.0 * delta),
            vut=(samples[1][5] - samples[2][5]) / (2.0 * delta),
            h=h,
            ht=ht,
            hu=(samples[1][6] - samples[2][6]) / (2.0 * delta),
        )
        return np.concatenate(derivatives), data


def _stack_fibers(frames: List[Tuple[np.ndarray, np.ndarray]], s: int) -> np.ndarray:
    return np.array([fiber for _, fiber in frames]).reshape(len(frames), s, s)


def _extend(vector: np.ndarray, size: int) -> np.ndarray:
    extended = np.zeros(size)
    extended[: vector.shape[0]] = vector
    return extended


def _mixing_matrix(mixing: np.ndarray) -> np.ndarray:
    """
    ``Omega`` with ``nabla_t E_B = Omega[C, B] E_C`` for the generalized transport
    """
    n, s = mixing.shape
    omega = np.zeros((n + s, n + s))
    omega[n:, :n] = mixing.T
    omega[:n, n:] = -mixing
    return omega


def _variation_derivative(
    U: np.ndarray,
    U_prime: np.ndarray,
    X: np.ndarray,
    data: _SliceData,
    curvature: np.ndarray,
    mixing: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Right hand side shared by both variation systems:

    - ``X' = R_AB c D v_c U_D + X Omega - Omega X - d_u Omega``
    - ``U'' = d_u d_t v - X' v - X d_t v - d_t Omega U - Omega U'``

    ``Omega`` vanishes for the isometry system, where this is ``U''_a =
    R_bacd v_b v_c U_d + d_u d_t v_a + d_t v_b X_ba`` and ``X'_ab = R_abcd v_c U_d``.
    """
    size = U.shape[0]
    n = data.v.shape[0]
    velocity = _extend(data.v, size)
    X_prime = np.einsum("abcd,c,d->ab", curvature[:, :, :n, :], data.v, U)
    X_prime = 0.5 * (X_prime - X_prime.T)
    if mixing is not None and mixing[0].shape[1]:
        omega, omega_t, omega_u = (_mixing_matrix(part) for part in mixing)
        X_prime = X_prime + X @ omega - omega @ X - omega_u
    U_second = (
        _extend(data.vut, size) - X_prime @ velocity - X @ _extend(data.vt, size)
    )
    if mixing is not None and mixing[0].shape[1]:
        U_second = U_second - omega_t @ U - omega @ U_prime
    return U_prime, U_second, X_prime


def _checked_curvature(curvature: np.ndarray, size: int) -> np.ndarray:
    curvature = np.asarray(curvature, dtype=float)
    if curvature.shape != (size,) * 4:
        raise DimensionMismatch(
            f"Curvature components must have shape {(size,) * 4}, got {curvature.shape}"
        )
    return curvature


def _integrate(
    family: FamilyInput,
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    config: Optional[IntegratorConfig],
    t_eval: Optional[Sequence[float]],
):
    try:
        return integrate_ivp(rhs, y0, (0.0, 1.0), config, t_eval=t_eval)
    except DomainExit as exc:
        raise DevelopmentNotExisting(
            f"Slice u={family.u} of {family.homotopy.name} left the chart at t={exc.t:.9g}",
            exit_time=exc.t,
        ) from exc


def solve_variation_isometry(
    family: FamilyInput,
    curvature: Optional[CurvatureOverride] = None,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> VariationTrajectory:
    """
    Variation field ``d_u Phi = U_a E_a`` and rotation ``nabla_u E_a = X_ab E_b`` along
    the slice ``gamma_u`` of the family, from

    - ``U''_a = R_bacd v_b v_c U_d + d_u d_t v_a + d_t v_b X_ba``
    - ``X'_ab = R_abcd v_c U_d``

    with ``U_i(0) = theta_i``, ``U_mu(0) = 0``, ``X_i,mu(0) = sigma_ij^mu theta_j``,
    ``X_ij(0) = X_mu,nu(0) = 0`` and ``U'_a(0) = d_u v_a + v_b X_ba``. With a bundle
    the fiber rotation ``D_u F_alpha = X_alpha,beta F_beta`` is solved as well,
    ``X'_alpha,beta = R^V_alpha,beta,c,d v_c U_d`` from zero.

    :param curvature: replaces ``R_abcd`` in the frame ``E_a``, receives the stage
    """
    n, s = family.dim, family.rank
    metric = family.homotopy.metric
    bundle = family.bundle
    slices = _SourceSlices(family)
    pairs = n * (n - 1) // 2
    fiber_pairs = s * (s - 1) // 2
    offset = slices.size

    def curvature_at(t: float, data: _SliceData) -> np.ndarray:
        if curvature is None:
            return frame_components(metric.riemann(data.point), data.frame)
        stage = VariationStage(
            u=family.u,
            t=t,
            point=data.point,
            frame=data.frame,
            fiber_frame=data.fiber_frame,
            velocity=data.v,
        )
        return _checked_curvature(curvature(stage), n)

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        source_derivative, data = slices.evaluate(t, state)
        U = state[offset : offset + n]
        U_prime = state[offset + n : offset + 2 * n]
        X = antisymmetric_from_upper(state[offset + 2 * n : offset + 2 * n + pairs], n)
        dU, dU_prime, dX = _variation_derivative(
            U, U_prime, X, data, curvature_at(t, data)
        )
        parts = [source_derivative, dU, dU_prime, upper_from_antisymmetric(dX)]
        if s:
            fiber_curvature = np.einsum(
                "xycd,xa,yb,cp,dq->abpq",
                bundle.curvature(data.point),
                data.fiber_frame,
                data.fiber_frame,
                data.frame,
                data.frame,
            )
            dXf = np.einsum("abcd,c,d->ab", fiber_curvature, data.v, U)
            parts.append(upper_from_antisymmetric(0.5 * (dXf - dXf.T)))
        return np.concatenate(parts)

    source0 = slices.initial()
    _, data0 = slices.evaluate(0.0, source0)
    U0 = family.initial_variation()
    X0 = family.initial_rotation()
    U_prime0 = data0.vu + X0.T @ data0.v
    y0 = np.concatenate(
        [source0, U0, U_prime0, upper_from_antisymmetric(X0), np.zeros(fiber_pairs)]
    )
    trajectory = _integrate(family, rhs, y0, config, t_eval)

    y = trajectory.y
    frames = [slices.frames(state) for state in y]
    points = np.array([family.homotopy.point(family.u, t) for t in trajectory.t])
    h = None
    if s:
        h = np.array(
            [slices.h_at(points[k], *frames[k]) for k in range(trajectory.t.shape[0])]
        )
    result = VariationTrajectory(
        u=family.u,
        t=trajectory.t,
        split=FrameSplit(n, 0),
        U=y[:, offset : offset + n],
        U_prime=y[:, offset + n : offset + 2 * n],
        X_upper=y[:, offset + 2 * n : offset + 2 * n + pairs],
        points=points,
        frames=np.array([frame for frame, _ in frames]),
        fiber_frames=_stack_fibers(frames, s),
        fiber_upper=y[:, offset + 2 * n + pairs :] if s else None,
        h=h,
        steps=trajectory.steps,
    )
    logger.debug(
        "Isometry variation at u=%.6f solved, |U(1)|=%.3e",
        family.u,
        float(np.linalg.norm(result.U[-1])),
    )
    return result


def solve_variation_immersion(
    family: FamilyInput,
    curvature: Optional[CurvatureOverride] = None,
    config: Optional[IntegratorConfig] = None,
    t_eval: Optional[Sequence[float]] = None,
) -> VariationTrajectory:
    """
    Variation ``d_u Phi~ = U~_A E~_A``, ``nabla_u E~_A = X~_AB E~_B`` of the family of
    generalized developments of ``(v(u, .), h(u, .))`` in the target. The target curve
    and its frame ``E~_A`` are solved alongside, only to evaluate ``R~_ABCD``.

    Initial data: ``U~_i = theta_i``, ``U~_mu = U~_alpha = 0``,
    ``X~_ab = X_ab(0)``, ``X~_a,alpha = h_ai^alpha theta_i``, ``X~_alpha,beta = 0``,
    ``U~'(0)`` from ``d_t (U~_A E~_A) = nabla_u (v_a E~_a)``, so ``U~'_alpha(0) = 0``.
    With ``s = 0`` this is the isometry system.

    :param curvature: replaces ``R~_ABCD`` in the frame ``E~_A``, receives the stage
    """
    if family.target_lift is None:
        raise VariationException("The immersion system needs a target lift")
    n, s = family.dim, family.rank
    size = n + s
    r = family.sub_dim
    target = family.target_lift.metric
    slices = _SourceSlices(family, with_h_rate=True)
    pairs = size * (size - 1) // 2
    offset = slices.size
    variation_offset = offset + size + size * size

    def curvature_at(
        t: float, data: _SliceData, point: np.ndarray, frame: np.ndarray
    ) -> np.ndarray:
        if curvature is None:
            return frame_components(target.riemann(point), frame)
        stage = VariationStage(
            u=family.u,
            t=t,
            point=data.point,
            frame=data.frame,
            fiber_frame=data.fiber_frame,
            velocity=data.v,
            target_point=point,
            target_frame=frame,
        )
        return _checked_curvature(curvature(stage), size)

    def rhs(t: float, state: np.ndarray) -> np.ndarray:
        source_derivative, data = slices.evaluate(t, state)
        point = state[offset : offset + size]
        frame = state[offset + size : variation_offset].reshape((size, size), order="F")
        mixing = data.mixing()
        velocity = frame[:, :n] @ data.v
        frame_derivative = -np.einsum(
            "abc,b,cm->am", target.christoffel(point), velocity, frame
        )
        if s:
            frame_derivative = frame_derivative + frame @ _mixing_matrix(mixing[0])
        U = state[variation_offset : variation_offset + size]
        U_prime = state[variation_offset + size : variation_offset + 2 * size]
        X = antisymmetric_from_upper(state[variation_offset + 2 * size :], size)
        dU, dU_prime, dX = _variation_derivative(
            U, U_prime, X, data, curvature_at(t, data, point, frame), mixing
        )
        return np.concatenate(
            [
                source_derivative,
                velocity,
                frame_derivative.flatten(order="F"),
                dU,
                dU_prime,
                upper_from_antisymmetric(dX),
            ]
        )

    source0 = slices.initial()
    _, data0 = slices.evaluate(0.0, source0)
    if data0.h.shape != (n, n, s):
        raise DimensionMismatch(f"h components must have shape {(n, n, s)}")
    target_point, target_frame = family.target_lift(
        family.parameter, family.frame, family.fiber_frame
    )
    U0 = _extend(family.initial_variation(), size)
    X0 = np.zeros((size, size))
    X0[:n, :n] = family.initial_rotation()
    mixed = np.einsum("aix,i->ax", data0.h[:, :r, :], family.theta)
    X0[:n, n:] = mixed
    X0[n:, :n] = -mixed.T
    omega0 = _mixing_matrix(data0.mixing()[0])
    U_prime0 = _extend(data0.vu, size) + X0.T @ _extend(data0.v, size) - omega0 @ U0
    y0 = np.concatenate(
        [
            source0,
            target_point,
            target_frame.flatten(order="F"),
            U0,
            U_prime0,
            upper_from_antisymmetric(X0),
        ]
    )
    trajectory = _integrate(family, rhs, y0, config, t_eval)

    y = trajectory.y
    count = trajectory.t.shape[0]
    frames = [slices.frames(state) for state in y]
    points = np.array([family.homotopy.point(family.u, t) for t in trajectory.t])
    result = VariationTrajectory(
        u=family.u,
        t=trajectory.t,
        split=FrameSplit(n, s),
        U=y[:, variation_offset : variation_offset + size],
        U_prime=y[:, variation_offset + size : variation_offset + 2 * size],
        X_upper=y[:, variation_offset + 2 * size :],
        points=points,
        frames=np.array([frame for frame, _ in frames]),
        fiber_frames=_stack_fibers(frames, s),
        h=np.array([slices.h_at(points[k], *frames[k]) for k in range(count)]),
        target_points=y[:, offset : offset + size],
        target_frames=y[:, offset + size : variation_offset]
        .reshape(-1, size, size)
        .transpose(0, 2, 1),
        steps=trajectory.steps,
    )
    logger.debug(
        "Immersion variation at u=%.6f solved, |U~(1)|=%.3e",
        family.u,
        float(np.linalg.norm(result.U[-1])),
    )
    return result


@dataclass(frozen=True)
class ReductionReport:
    residuals: Dict[str, float]
    tolerance: float = REDUCTION_TOLERANCE

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def to_dict(self) -> Dict[str, object]:
        return {
            "residuals": dict(self.residuals),
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def reduction_check(
    immersion: VariationTrajectory,
    isometry: VariationTrajectory,
    h_data: Optional[np.ndarray] = None,
    tolerance: float = REDUCTION_TOLERANCE,
) -> ReductionReport:
    """
    Compare the immersion system with the isometry system (plus fiber rotation) of the
    same family: ``U~_a = U_a``, ``U~_alpha = 0``, ``X~_ab = X_ab``,
    ``X~_alpha,beta = X_alpha,beta`` and ``X~_a,alpha = h_ab^alpha U_b``.

    :param h_data: ``h_ab^alpha`` on the grid, the samples stored with ``immersion`` by
        default
    :raises GridMismatch: solutions on different grids or splits
    """
    n, s = immersion.split.tangent_count, immersion.split.normal_count
    if (
        immersion.t.shape != isometry.t.shape
        or np.max(np.abs(immersion.t - isometry.t)) > GRID_TOLERANCE
    ):
        raise GridMismatch("Variation solutions are sampled on different grids")
    if isometry.size != n:
        raise GridMismatch(
            f"Isometry system of size {isometry.size} for a tangent block of size {n}"
        )
    h = immersion.h if h_data is None else np.asarray(h_data, dtype=float)
    if h is None or h.shape != (immersion.t.shape[0], n, n, s):
        raise GridMismatch(f"h data must have shape {(immersion.t.shape[0], n, n, s)}")
    if s and isometry.fiber_X is None:
        raise GridMismatch("The isometry solution carries no fiber rotation")

    X_immersion = immersion.X
    residuals = {
        "U_tangent": _max_abs(immersion.U[:, :n] - isometry.U),
        "U_normal": _max_abs(immersion.U[:, n:]),
        "X_tangent": _max_abs(X_immersion[:, :n, :n] - isometry.X),
        "X_normal": _max_abs(X_immersion[:, n:, n:] - isometry.fiber_X)
        if s
        else 0.0,
        "X_mixed": _max_abs(
            X_immersion[:, :n, n:] - np.einsum("kabx,kb->kax", h, isometry.U)
        ),
    }
    report = ReductionReport(residuals=residuals, tolerance=tolerance)
    if not report.passed:
        logger.warning(
            "Reduction check failed at u=%.6f, max residual %.3e",
            immersion.u,
            report.max_residual,
        )
    return report
