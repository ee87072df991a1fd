import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import DEFAULT_CHECK_TOLERANCE, DEFAULT_CURVE_COUNT
from ..geometry import GeometryException, direct_sum_connection, frame_components
from ..geometry.linalg import gram_drift
from ..geometry.submanifold import directional_derivative
from ..integrate import IntegrationException, IntegratorConfig
from ..reconstruct import (
    CahProblem,
    Reconstruction,
    ReconstructionException,
    reconstruct_along,
)
from ..transport import CurvePath, DevelopmentNotExisting, TransportException
from .exceptions import ConditionNotApplicable, NoUsableCurve
from .report import Condition, CurveFailure, HypothesisReport
from .sampling import index_tuples, sample_curves

try:
    from functools import cached_property
except ImportError:
    from cached_property import cached_property

logger = logging.getLogger(__name__)

MAP_SAMPLES = 8
MAP_MARGIN = 0.1

CurveErrors = (
    TransportException,
    ReconstructionException,
    GeometryException,
    IntegrationException,
)


class EndpointData:
    """
    Tensors at ``gamma(1)`` and ``gamma~(1)`` in the frames ``E_a(1)``, ``F_alpha(1)``
    and ``E~_A(1) = tau(E_a(1), F_alpha(1))``
    """

    def __init__(self, problem: CahProblem, curve_id: int, reconstruction: Reconstruction):
        self.problem = problem
        self.curve_id = curve_id
        self.reconstruction = reconstruction
        self.point = reconstruction.point
        self.frame = reconstruction.source_frame
        self.fiber_frame = reconstruction.fiber_frame
        self.target_frame = reconstruction.development.final_frame

    @cached_property
    def source_curvature(self) -> np.ndarray:
        return frame_components(self.problem.source.riemann(self.point), self.frame)

    @cached_property
    def target_curvature(self) -> np.ndarray:
        target = self.problem.target
        return frame_components(
            target.riemann(self.reconstruction.f_point), self.target_frame
        )

    @cached_property
    def h(self) -> np.ndarray:
        bundle = self.problem.working_bundle
        return np.einsum(
            "pqb,pa,qc,bg,gd->acd",
            bundle.h_at(self.point),
            self.frame,
            self.frame,
            bundle.metric_at(self.point),
            self.fiber_frame,
        )

    @cached_property
    def h_derivative(self) -> np.ndarray:
        """
        ``Dh[x, y, z, alpha] = h_V((D_{E_x} h)(E_y, E_z), F_alpha)``
        """
        bundle = self.problem.working_bundle
        return np.einsum(
            "cabp,cx,ay,bz,pq,qw->xyzw",
            bundle.h_covariant_derivative(self.point),
            self.frame,
            self.frame,
            self.frame,
            bundle.metric_at(self.point),
            self.fiber_frame,
        )

    @cached_property
    def bundle_curvature(self) -> np.ndarray:
        """
        ``RV[alpha, beta, x, y] = h_V(R^V(E_x, E_y) F_alpha, F_beta)``
        """
        return np.einsum(
            "pqcd,pa,qb,cx,dy->abxy",
            self.problem.working_bundle.curvature(self.point),
            self.fiber_frame,
            self.fiber_frame,
            self.frame,
            self.frame,
        )

    @property
    def curvature_scale(self) -> float:
        return max(
            float(np.max(np.abs(self.source_curvature))),
            float(np.max(np.abs(self.target_curvature))),
        )


def gauss_residual(data: EndpointData) -> np.ndarray:
    """
    ``R(X,Y,Z,W) - (tau^* R~)(X,Y,Z,W) - <h(X,W), h(Y,Z)> + <h(X,Z), h(Y,W)>``;
    without fiber this is the curvature pullback residual
    """
    n = data.problem.dim
    residual = data.source_curvature - data.target_curvature[:n, :n, :n, :n]
    if data.problem.rank:
        h = data.h
        residual = (
            residual
            - np.einsum("adx,bcx->abcd", h, h)
            + np.einsum("acx,bdx->abcd", h, h)
        )
    return residual


def codazzi_residual(data: EndpointData) -> np.ndarray:
    """
    ``(D_X h)(Y, Z) - (D_Y h)(X, Z) - (tau^* R~)(Z, xi, X, Y)``, indexed ``[x, y, z, alpha]``
    """
    n = data.problem.dim
    derivative = data.h_derivative
    mixed = np.einsum("zaxy->xyza", data.target_curvature[:n, n:, :n, :n])
    return derivative - derivative.transpose(1, 0, 2, 3) - mixed


def ricci_residual(data: EndpointData) -> np.ndarray:
    """
    ``R^V(xi, eta, X, Y) - (tau^* R~)(xi, eta, X, Y) - <A_xi Y, A_eta X>
    + <A_eta Y, A_xi X>``, indexed ``[alpha, beta, x, y]``
    """
    n = data.problem.dim
    h = data.h
    return (
        data.bundle_curvature
        - data.target_curvature[n:, n:, :n, :n]
        - np.einsum("yba,xbc->acxy", h, h)
        + np.einsum("ybc,xba->acxy", h, h)
    )


def _evaluate_curves(
    problem: CahProblem,
    curves: Sequence[CurvePath],
    threads: int,
    config: Optional[IntegratorConfig],
) -> Tuple[List[EndpointData], List[CurveFailure]]:
    def run(indexed: Tuple[int, CurvePath]):
        curve_id, curve = indexed
        try:
            return EndpointData(problem, curve_id, reconstruct_along(problem, curve, config))
        except CurveErrors as exc:
            exit_time = exc.exit_time if isinstance(exc, DevelopmentNotExisting) else None
            logger.warning("%s: curve %d failed: %s", problem.name, curve_id, exc)
            return CurveFailure(curve_id, type(exc).__name__, str(exc), exit_time)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        outcomes = list(executor.map(run, enumerate(curves)))
    evaluated = [outcome for outcome in outcomes if isinstance(outcome, EndpointData)]
    failures = [outcome for outcome in outcomes if isinstance(outcome, CurveFailure)]
    if not evaluated:
        raise NoUsableCurve(f"{problem.name}: none of {len(curves)} curves could be used")
    return evaluated, failures


def _tensor_check(
    condition: Condition,
    problem: CahProblem,
    residual: Callable[[EndpointData], np.ndarray],
    curves: Optional[Sequence[CurvePath]],
    extra_curves: Sequence[CurvePath],
    tolerance: float,
    seed: int,
    count: int,
    threads: int,
    config: Optional[IntegratorConfig],
) -> HypothesisReport:
    if curves is None:
        curves = sample_curves(problem, count, seed)
    curves = list(curves) + list(extra_curves)
    evaluated, failures = _evaluate_curves(problem, curves, threads, config)

    rng = np.random.default_rng(seed)
    indices = None
    max_residual, worst_curve, worst_indices = 0.0, None, ()
    scale = 1.0
    for data in evaluated:
        values = residual(data)
        if indices is None:
            indices = index_tuples(values.shape, problem.dim + problem.rank, rng)
        scale = max(scale, data.curvature_scale)
        for index in indices:
            value = abs(float(values[index]))
            if value > max_residual or worst_curve is None:
                max_residual, worst_curve, worst_indices = value, data.curve_id, index

    report = HypothesisReport(
        condition=condition,
        curves_sampled=len(evaluated),
        max_residual=max_residual,
        tolerance=tolerance * scale,
        seed=seed,
        scale=scale,
        worst_curve=worst_curve,
        worst_indices=tuple(int(i) for i in worst_indices),
        failures=tuple(failures),
    )
    _log_report(problem, report)
    return report


def _log_report(problem: CahProblem, report: HypothesisReport) -> None:
    if report.passed:
        logger.info(
            "%s: %s passed, residual %.3e",
            problem.name,
            report.condition.value,
            report.max_residual,
        )
    else:
        logger.warning(
            "%s: %s failed, residual %.3e >= %.3e",
            problem.name,
            report.condition.value,
            report.max_residual,
            report.tolerance,
        )


def check_isometry_curvature(
    problem: CahProblem,
    curves: Optional[Sequence[CurvePath]] = None,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    count: int = DEFAULT_CURVE_COUNT,
    threads: int = 1,
    extra_curves: Sequence[CurvePath] = (),
    config: Optional[IntegratorConfig] = None,
) -> HypothesisReport:
    """
    ``tau^* R~ = R`` at the curve endpoints

    :raises ConditionNotApplicable: for immersion problems
    """
    if problem.rank:
        raise ConditionNotApplicable(
            f"{problem.name}: curvature pullback needs an isometry problem"
        )
    return _tensor_check(
        Condition.CURVATURE,
        problem,
        gauss_residual,
        curves,
        extra_curves,
        tolerance,
        seed,
        count,
        threads,
        config,
    )


def check_gauss(
    problem: CahProblem,
    curves: Optional[Sequence[CurvePath]] = None,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    count: int = DEFAULT_CURVE_COUNT,
    threads: int = 1,
    extra_curves: Sequence[CurvePath] = (),
    config: Optional[IntegratorConfig] = None,
) -> HypothesisReport:
    """
    Gauss condition at the curve endpoints. For ``s = 0`` it is the curvature
    pullback check.
    """
    return _tensor_check(
        Condition.GAUSS,
        problem,
        gauss_residual,
        curves,
        extra_curves,
        tolerance,
        seed,
        count,
        threads,
        config,
    )


def _vacuous(problem: CahProblem, condition: Condition, seed: int) -> HypothesisReport:
    report = HypothesisReport(
        condition=condition,
        curves_sampled=0,
        max_residual=0.0,
        tolerance=DEFAULT_CHECK_TOLERANCE,
        seed=seed,
        details={"vacuous": 1.0},
    )
    logger.info("%s: %s holds vacuously", problem.name, condition.value)
    return report


def check_codazzi(
    problem: CahProblem,
    curves: Optional[Sequence[CurvePath]] = None,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    count: int = DEFAULT_CURVE_COUNT,
    threads: int = 1,
    extra_curves: Sequence[CurvePath] = (),
    config: Optional[IntegratorConfig] = None,
) -> HypothesisReport:
    """
    Codazzi condition, with ``D h`` taken by the bundle's derivative mode
    """
    if not problem.rank:
        return _vacuous(problem, Condition.CODAZZI, seed)
    return _tensor_check(
        Condition.CODAZZI,
        problem,
        codazzi_residual,
        curves,
        extra_curves,
        tolerance,
        seed,
        count,
        threads,
        config,
    )


def check_ricci(
    problem: CahProblem,
    curves: Optional[Sequence[CurvePath]] = None,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    count: int = DEFAULT_CURVE_COUNT,
    threads: int = 1,
    extra_curves: Sequence[CurvePath] = (),
    config: Optional[IntegratorConfig] = None,
) -> HypothesisReport:
    """
    Ricci condition. Antisymmetric in the fiber indices, so it holds vacuously for
    ``s < 2``.
    """
    if problem.rank < 2:
        return _vacuous(problem, Condition.RICCI, seed)
    return _tensor_check(
        Condition.RICCI,
        problem,
        ricci_residual,
        curves,
        extra_curves,
        tolerance,
        seed,
        count,
        threads,
        config,
    )


@dataclass(frozen=True)
class _Section:
    normal: Callable[[np.ndarray], np.ndarray]
    fiber: Callable[[np.ndarray], np.ndarray]

    def __call__(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.normal(u), self.fiber(u)


def _basis_sections(problem: CahProblem) -> List[_Section]:
    """
    Adapted normal columns of S and orthonormal fiber frame columns, as sections
    over the S parameters
    """
    sub = problem.source_sub
    n, r, s = problem.dim, sub.dim, problem.rank
    sections = []
    for column in range(r, n):
        sections.append(
            _Section(
                normal=lambda u, column=column: sub.adapted_frame(u)[:, column],
                fiber=lambda u: np.zeros(s),
            )
        )
    for column in range(s):
        sections.append(
            _Section(
                normal=lambda u: np.zeros(n),
                fiber=lambda u, column=column: problem.bundle.orthonormal_frame(
                    sub.point(u)
                )[:, column],
            )
        )
    return sections


def _map_residuals(problem: CahProblem, u: np.ndarray) -> Dict[str, float]:
    """
    Gramian preservation, connection intertwining and ``psi^* sigma~ = sigma + h``
    at ``x(u)``
    """
    sub = problem.source_sub
    target_sub = problem.target_sub
    r, s = sub.dim, problem.rank
    x = sub.point(u)
    frame, fiber_frame = problem.initial_frames(u)
    target_point, target_frame = problem.lift(u, frame, fiber_frame)
    target_g = problem.target.g(target_point)
    gramian = gram_drift(target_frame, target_g)

    phi_u = problem.maps.phi_at(u)
    pushforward = problem.phi_pushforward(u)
    psi_tilde = problem.psi_tilde(u)
    psi_fiber = problem.psi_fiber(u)
    target_normal = target_sub.normal_projector(phi_u)
    target_gamma = problem.target.christoffel(target_point)

    def mapped(normal: np.ndarray, fiber: np.ndarray) -> np.ndarray:
        image = psi_tilde @ normal
        if s:
            image = image + psi_fiber @ fiber
        return image

    connection = 0.0
    for i in range(r):
        vector = frame[:, i]
        direction = sub.parameter_coefficients(u, vector)
        image_vector = pushforward @ vector
        for section in _basis_sections(problem):
            if s:
                normal_part, fiber_part = direct_sum_connection(
                    sub, problem.bundle, u, vector, section
                )
            else:
                normal_part = sub.normal_connection(u, vector, section.normal)
                fiber_part = np.zeros(0)
            expected = mapped(normal_part, fiber_part)

            def target_section(p: np.ndarray, section=section) -> np.ndarray:
                p_normal, p_fiber = section(p)
                image = problem.psi_tilde(p) @ p_normal
                if s:
                    image = image + problem.psi_fiber(p) @ p_fiber
                return image

            value = target_section(u)
            derivative = directional_derivative(target_section, u, direction, sub.fd_step)
            covariant = derivative + np.einsum(
                "kpq,p,q->k", target_gamma, image_vector, value
            )
            connection = max(
                connection,
                float(np.max(np.abs(target_normal @ covariant - expected))),
            )

    second_form = 0.0
    for i in range(r):
        for j in range(i, r):
            first, second = frame[:, i], frame[:, j]
            sigma = target_sub.second_fundamental_form(
                phi_u, pushforward @ first, pushforward @ second
            )
            expected = psi_tilde @ sub.second_fundamental_form(u, first, second)
            if s:
                expected = expected + psi_fiber @ problem.bundle.h_vector(x, first, second)
            second_form = max(second_form, float(np.max(np.abs(sigma - expected))))
    return {"gramian": gramian, "connection": connection, "second_form": second_form}


def check_bundle_maps(
    problem: CahProblem,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    samples: int = MAP_SAMPLES,
) -> HypothesisReport:
    """
    ``phi`` and ``psi`` at seeded points of S: inner products, connections
    (``psi o D~ = nabla~^perp o psi``) and ``psi^* sigma~ = sigma + h|_S``
    """
    rng = np.random.default_rng(seed)
    parameters = problem.source_sub.box.sample(rng, samples, margin=MAP_MARGIN)
    details = {"gramian": 0.0, "connection": 0.0, "second_form": 0.0}
    worst, worst_value = None, -1.0
    for index, u in enumerate(parameters):
        residuals = _map_residuals(problem, u)
        for key, value in residuals.items():
            details[key] = max(details[key], value)
        largest = max(residuals.values())
        if largest > worst_value:
            worst, worst_value = index, largest
    report = HypothesisReport(
        condition=Condition.MAPS,
        curves_sampled=samples,
        max_residual=max(details.values()),
        tolerance=tolerance,
        seed=seed,
        worst_curve=worst,
        details=details,
    )
    _log_report(problem, report)
    return report


def default_conditions(problem: CahProblem) -> List[Condition]:
    if problem.rank:
        return [Condition.GAUSS, Condition.CODAZZI, Condition.RICCI, Condition.MAPS]
    return [Condition.CURVATURE, Condition.MAPS]


def run_checks(
    problem: CahProblem,
    conditions: Optional[Sequence[Condition]] = None,
    tolerance: float = DEFAULT_CHECK_TOLERANCE,
    seed: int = 0,
    count: int = DEFAULT_CURVE_COUNT,
    threads: int = 1,
    curves: Optional[Sequence[CurvePath]] = None,
    config: Optional[IntegratorConfig] = None,
) -> List[HypothesisReport]:
    """
    Runs ``conditions`` (by default the ones of the problem mode) on one shared curve
    sample, in the order given
    """
    conditions = list(conditions or default_conditions(problem))
    if curves is None:
        curves = sample_curves(problem, count, seed)
    checks = {
        Condition.CURVATURE: check_isometry_curvature,
        Condition.GAUSS: check_gauss,
        Condition.CODAZZI: check_codazzi,
        Condition.RICCI: check_ricci,
    }
    reports = []
    for condition in conditions:
        if condition is Condition.MAPS:
            reports.append(check_bundle_maps(problem, tolerance, seed))
        else:
            reports.append(
                checks[condition](
                    problem,
                    curves,
                    tolerance=tolerance,
                    seed=seed,
                    threads=threads,
                    config=config,
                )
            )
    return reports
