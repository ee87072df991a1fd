import logging
import math
from typing import Callable, Dict, List

import numpy as np

from ..compat import run_checks
from ..constants import (
    DEFAULT_CHECK_TOLERANCE,
    DEFAULT_CURVE_COUNT,
    DEFAULT_WELL_DEFINED_TOLERANCE,
)
from ..geometry import FrameSplit, MetricField
from ..reconstruct import (
    PathStrategy,
    cartan_normal_map,
    pushforward_ratio,
    reconstruct_map,
    reconstruct_points,
    restriction_residual,
    well_definedness,
)
from ..scenarios import oracle_sphere_embedding, sphere_into_space
from ..transport import (
    DegenerateGrid,
    Development,
    HProfile,
    InvalidProfile,
    VelocityProfile,
    anti_develop,
    develop,
    generalized_develop,
    standard_frame,
    transport_frames,
)
from ..variation import (
    FamilyInput,
    finite_difference_generalized_variation,
    finite_difference_variation,
    reduction_check,
    solve_variation_immersion,
    solve_variation_isometry,
)
from .config import RunConfig
from .exceptions import EXIT_CHECK_FAILED, EXIT_OK, ConfigValidationError
from .output import CommandResult, Table

logger = logging.getLogger(__name__)

VARIATION_SAMPLES = 101
VARIATION_DELTA = 1e-4
DEMO_POINTS = 20
DEMO_SAMPLES = 401
DEMO_RADIAL_TOLERANCE = 1e-5
DEMO_BAND = 0.6  # half height in theta of the sampled band around the equator

Command = Callable[[RunConfig], CommandResult]


def _coordinates(prefix: str, count: int) -> List[str]:
    return [f"{prefix}{index + 1}" for index in range(count)]


def _frame_header(dim: int, count: int) -> List[str]:
    return [f"E{a + 1}_{i + 1}" for a in range(count) for i in range(dim)]


def _initial_frame(config: RunConfig, metric: MetricField, point: np.ndarray) -> np.ndarray:
    frame = config.array("frame")
    return standard_frame(metric, point) if frame is None else frame


def _development_table(development: Development) -> Table:
    dim = development.points.shape[1]
    count = development.frames.shape[2]
    rows = np.concatenate(
        [
            development.t[:, np.newaxis],
            development.points,
            development.frames.transpose(0, 2, 1).reshape(development.t.shape[0], -1),
        ],
        axis=1,
    )
    return Table(["t"] + _coordinates("x", dim) + _frame_header(dim, count), rows)


def _development_report(development: Development) -> Dict[str, object]:
    return {
        "endpoint": development.endpoint.tolist(),
        "final_frame": development.final_frame.tolist(),
        "max_gram_drift": development.max_gram_drift(),
        "steps": development.steps,
    }


def run_transport(config: RunConfig) -> CommandResult:
    """
    Parallel transport of ``vectors`` (rows) along ``curve``. On surfaces the report
    carries the rotation angle of the first vector against the chart-axes orthonormal
    frame, in ``[0, 2 pi)``.
    """
    metric = config.manifold()
    curve = config.curve(metric)
    vectors = np.atleast_2d(np.asarray(config.section("vectors"), dtype=float))
    if vectors.shape[1] != metric.dim:
        raise ConfigValidationError(f"Vectors must have {metric.dim} components", "vectors")
    frame = standard_frame(metric, curve.start)
    frames = transport_frames(curve, frame, config.integrator())
    coefficients = np.linalg.solve(frame, vectors.T)
    transported = np.einsum("kij,jm->kmi", frames, coefficients)
    rows = np.concatenate(
        [
            curve.t[:, np.newaxis],
            curve.points,
            transported.reshape(curve.t.shape[0], -1),
        ],
        axis=1,
    )
    header = ["t"] + _coordinates("x", metric.dim)
    header += [
        f"w{m + 1}_{i + 1}" for m in range(vectors.shape[0]) for i in range(metric.dim)
    ]
    start_norms = [metric.norm(curve.start, vector) for vector in vectors]
    end_norms = [metric.norm(curve.end, vector) for vector in transported[-1]]
    report: Dict[str, object] = {
        "start": curve.start.tolist(),
        "end": curve.end.tolist(),
        "transported": transported[-1].tolist(),
        "norm_change": max(abs(a - b) for a, b in zip(start_norms, end_norms)),
    }
    if metric.dim == 2:
        before = coefficients[:, 0]
        after = np.linalg.solve(standard_frame(metric, curve.end), transported[-1][0])
        angle = math.atan2(
            before[0] * after[1] - before[1] * after[0], float(before @ after)
        )
        report["rotation_angle"] = angle % (2.0 * math.pi)
    return CommandResult(report=report, tables={"transport": Table(header, rows)})


def _velocity_profile(
    config: RunConfig, point: np.ndarray, frame: np.ndarray
) -> VelocityProfile:
    """
    ``velocity`` is either constant components or ``{"t": [...], "values": [...]}``
    """
    spec = config.section("velocity")
    try:
        if isinstance(spec, dict):
            return VelocityProfile.from_samples(point, frame, spec["t"], spec["values"])
        return VelocityProfile.constant(point, frame, spec)
    except (InvalidProfile, DegenerateGrid) as exc:
        raise ConfigValidationError(str(exc), "velocity") from exc


def _h_profile(config: RunConfig, split: FrameSplit) -> HProfile:
    if "h" not in config.data:
        return HProfile.zero(split)
    spec = config.data["h"]
    try:
        if isinstance(spec, dict):
            return HProfile.from_samples(split, spec["t"], spec["values"])
        h = np.asarray(spec, dtype=float)
        if h.shape != (split.tangent_count, split.tangent_count, split.normal_count):
            raise InvalidProfile(f"h must have shape {HProfile.zero(split).shape}")
        return HProfile.constant(split, h)
    except (InvalidProfile, DegenerateGrid) as exc:
        raise ConfigValidationError(str(exc), "h") from exc


def run_develop(config: RunConfig) -> CommandResult:
    """
    Development of ``velocity`` (constant or tabulated) in ``frame`` from ``point``
    """
    metric = config.manifold()
    point = config.array("point")
    if point is None:
        point = metric.box.center
    frame = _initial_frame(config, metric, point)
    velocity = _velocity_profile(config, point, frame)
    samples = config.samples
    development = develop(
        metric,
        point,
        frame,
        velocity,
        config.integrator(),
        t_eval=np.linspace(0.0, 1.0, samples),
    )
    return CommandResult(
        report=_development_report(development),
        tables={"develop": _development_table(development)},
    )


def run_gdevelop(config: RunConfig) -> CommandResult:
    """
    Generalized development of ``velocity`` and ``h`` for a ``split``, each constant
    or tabulated on a grid of [0, 1]
    """
    metric = config.manifold()
    split_spec = config.section("split")
    split = FrameSplit(split_spec["tangent"], split_spec["normal"])
    if split.total != metric.dim:
        raise ConfigValidationError(
            f"Split {split.tangent_count}+{split.normal_count} for dimension {metric.dim}",
            "split",
        )
    point = config.array("point")
    if point is None:
        point = metric.box.center
    frame = _initial_frame(config, metric, point)
    profile = _h_profile(config, split)
    velocity = _velocity_profile(config, point, frame)
    development = generalized_develop(
        metric,
        point,
        frame,
        split,
        velocity,
        profile,
        config.integrator(),
        t_eval=np.linspace(0.0, 1.0, config.samples),
    )
    return CommandResult(
        report=_development_report(development),
        tables={"gdevelop": _development_table(development)},
    )


def run_anti_develop(config: RunConfig) -> CommandResult:
    """
    Anti-development of ``curve``, with the round-trip error of developing it back
    """
    metric = config.manifold()
    curve = config.curve(metric)
    integrator = config.integrator()
    frame = _initial_frame(config, metric, curve.start)
    velocity = anti_develop(curve, frame, integrator)
    round_trip = develop(metric, curve.start, frame, velocity, integrator, t_eval=curve.t)
    rows = np.concatenate([curve.t[:, np.newaxis], velocity.values], axis=1)
    report = {
        "round_trip_error": float(np.max(np.abs(round_trip.points - curve.points))),
        "final_velocity": velocity.values[-1].tolist(),
    }
    header = ["t"] + _coordinates("v", velocity.values.shape[1])
    return CommandResult(report=report, tables={"anti_develop": Table(header, rows)})


def run_variation(config: RunConfig) -> CommandResult:
    """
    Variation systems along the slices ``u_values`` of a cone homotopy, compared with
    finite differences of the slices; immersion problems also run the reduction check
    """
    problem = config.problem()
    homotopy = config.homotopy(problem)
    integrator = config.integrator()
    samples = config.data.get("samples", VARIATION_SAMPLES)
    delta = config.data.get("delta", VARIATION_DELTA)
    grid = np.linspace(0.0, 1.0, samples)
    u_values = config.data.get("u_values", [0.5])
    immersion = problem.mode.is_immersion

    slices = []
    tables = []
    exit_code = EXIT_OK
    for u in u_values:
        family = FamilyInput.build(
            homotopy,
            u,
            bundle=problem.working_bundle,
            target_lift=problem.target_lift() if immersion else None,
            config=integrator,
        )
        isometry = solve_variation_isometry(family, config=integrator, t_eval=grid)
        entry: Dict[str, object] = {"u": u}
        if immersion:
            trajectory = solve_variation_immersion(family, config=integrator, t_eval=grid)
            reference = finite_difference_generalized_variation(
                family, delta, samples, integrator
            )
            reduction = reduction_check(trajectory, isometry)
            entry["reduction"] = reduction.to_dict()
            if not reduction.passed:
                exit_code = EXIT_CHECK_FAILED
        else:
            trajectory = isometry
            reference = finite_difference_variation(family, delta, samples, integrator)
        entry["fd_max_difference"] = float(np.max(np.abs(trajectory.U - reference.U)))
        entry["endpoint_variation"] = float(np.linalg.norm(trajectory.U[-1]))
        slices.append(entry)
        tables.append(trajectory)

    table = Table(tables[0].header(), np.concatenate([t.rows() for t in tables]))
    report = {"problem": problem.name, "mode": problem.mode.value, "slices": slices}
    return CommandResult(report=report, tables={"variation": table}, exit_code=exit_code)


def run_reconstruct(config: RunConfig) -> CommandResult:
    """
    ``f`` at ``points`` (straight lines from S, or the Cartan normal geodesics in
    Cartan modes), or at the end of a user ``curve``
    """
    problem = config.problem()
    integrator = config.integrator()
    strategy = PathStrategy(config.data.get("strategy", PathStrategy.STRAIGHT_LINE.value))
    n, target_dim = problem.dim, problem.target.dim

    if strategy is PathStrategy.USER_CURVE:
        curve = config.curve(problem.source)
        results = [
            reconstruct_map(problem, curve.end, strategy, curve, config=integrator)
        ]
        points = np.array([curve.end])
    else:
        points = np.atleast_2d(config.array("points", [problem.source.box.center]))
        if problem.mode.is_cartan:
            results = [cartan_normal_map(problem, x, integrator) for x in points]
        else:
            results = reconstruct_points(
                problem, list(points), config.threads, config.samples, integrator
            )

    images = np.array([result.f_point for result in results])
    defects = np.array([result.tau.isometry_defect() for result in results])
    rows = np.concatenate([points, images, defects[:, np.newaxis]], axis=1)
    header = _coordinates("x", n) + _coordinates("f", target_dim) + ["isometry_defect"]
    report = {
        "problem": problem.name,
        "mode": problem.mode.value,
        "points": [
            {
                "point": result.point.tolist(),
                "f_point": result.f_point.tolist(),
                "tau_matrix": result.tau.matrix.tolist(),
                "isometry_defect": result.tau.isometry_defect(),
            }
            for result in results
        ],
    }
    return CommandResult(report=report, tables={"reconstruct": Table(header, rows)})


def run_check(config: RunConfig) -> CommandResult:
    problem = config.problem()
    tolerance = config.tolerance or DEFAULT_CHECK_TOLERANCE
    reports = run_checks(
        problem,
        config.conditions,
        tolerance=tolerance,
        seed=config.seed,
        count=config.data.get("count", DEFAULT_CURVE_COUNT),
        threads=config.threads,
        config=config.integrator(),
    )
    passed = all(report.passed for report in reports)
    return CommandResult(
        report={
            "problem": problem.name,
            "passed": passed,
            "reports": [report.to_dict() for report in reports],
        },
        exit_code=EXIT_OK if passed else EXIT_CHECK_FAILED,
    )


def run_check_well_defined(config: RunConfig) -> CommandResult:
    problem = config.problem()
    report = well_definedness(
        problem,
        config.homotopy(problem),
        config.data.get("u_values"),
        tolerance=config.tolerance or DEFAULT_WELL_DEFINED_TOLERANCE,
        samples=config.samples,
        threads=config.threads,
        config=config.integrator(),
    )
    rows = np.concatenate([report.u_values[:, np.newaxis], report.endpoints], axis=1)
    header = ["u"] + _coordinates("f", report.endpoints.shape[1])
    return CommandResult(
        report={"problem": problem.name, **report.to_dict()},
        tables={"endpoints": Table(header, rows)},
        exit_code=EXIT_OK if report.passed else EXIT_CHECK_FAILED,
    )


def run_demo(config: RunConfig) -> CommandResult:
    """
    The unit sphere rebuilt in flat 3-space from its equator and normal data,
    measured against the standard embedding
    """
    problem = sphere_into_space()
    integrator = config.integrator()
    samples = config.data.get("samples", DEMO_SAMPLES)
    count = config.data.get("count", DEMO_POINTS)
    rng = np.random.default_rng(config.seed)
    points = np.column_stack(
        [
            rng.uniform(math.pi / 2.0 - DEMO_BAND, math.pi / 2.0 + DEMO_BAND, count),
            rng.uniform(-math.pi, math.pi, count),
        ]
    )
    results = reconstruct_points(problem, list(points), config.threads, samples, integrator)
    images = np.array([result.f_point for result in results])
    expected = np.array([oracle_sphere_embedding(x) for x in points])
    radial = np.abs(np.linalg.norm(images, axis=1) - 1.0)
    ratio = pushforward_ratio(
        problem, points[0], np.array([0.0, 1.0]), samples=samples, config=integrator
    )
    restriction = restriction_residual(problem, np.array([0.3]), samples, integrator)
    passed = float(np.max(radial)) < DEMO_RADIAL_TOLERANCE
    report = {
        "problem": problem.name,
        "points": count,
        "max_radial_error": float(np.max(radial)),
        "max_embedding_error": float(np.max(np.linalg.norm(images - expected, axis=1))),
        "pushforward_ratio_error": abs(ratio - 1.0),
        "restriction_residual": restriction,
        "passed": passed,
    }
    rows = np.concatenate([points, images, radial[:, np.newaxis]], axis=1)
    header = ["theta", "phi", "f1", "f2", "f3", "radial_error"]
    logger.info(
        "Demo: max radial error %.3e over %d points", report["max_radial_error"], count
    )
    return CommandResult(
        report=report,
        tables={"demo": Table(header, rows)},
        exit_code=EXIT_OK if passed else EXIT_CHECK_FAILED,
    )


COMMANDS: Dict[str, Command] = {
    "transport": run_transport,
    "develop": run_develop,
    "gdevelop": run_gdevelop,
    "anti-develop": run_anti_develop,
    "variation": run_variation,
    "reconstruct": run_reconstruct,
    "check": run_check,
    "check-well-defined": run_check_well_defined,
    "demo": run_demo,
}


def run(config: RunConfig) -> CommandResult:
    logger.info("Running %s with seed %d", config.command, config.seed)
    return COMMANDS[config.command](config)
