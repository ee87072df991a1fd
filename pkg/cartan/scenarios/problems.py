import logging
import math
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ..geometry import MetricField
from ..reconstruct import BundleMaps, CahProblem, ProblemMode, TabulatedBundleMaps
from . import catalog
from .exceptions import UnknownScenario

logger = logging.getLogger(__name__)


def _mode(mode: Any, default: ProblemMode) -> ProblemMode:
    if mode is None:
        return default
    return mode if isinstance(mode, ProblemMode) else ProblemMode(mode)


def _constant(matrix: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    matrix = np.asarray(matrix, dtype=float)
    return lambda u: matrix.copy()


def identity_maps(dim: int) -> BundleMaps:
    return BundleMaps(
        phi=lambda u: np.asarray(u, dtype=float),
        psi_normal=_constant(np.eye(dim)),
        phi_jacobian=lambda u: np.eye(np.asarray(u).shape[0]),
    )


def identity_sphere(mode: Any = None) -> CahProblem:
    """
    ``M = M~`` the unit sphere chart, ``S = S~`` the equator, ``phi``, ``psi`` identity
    """
    metric = catalog.sphere_chart()
    sub = catalog.equator(metric)
    return CahProblem(
        source=metric,
        source_sub=sub,
        target=metric,
        target_sub=sub,
        maps=identity_maps(2),
        mode=_mode(mode, ProblemMode.ISOMETRY),
        name="identity-sphere",
    )


def equator_rotation(beta: float = math.pi / 6.0, mode: Any = None) -> CahProblem:
    """
    Rotation by ``beta`` about the polar axis: ``phi(u) = u + beta`` on the equator,
    ``psi(d_theta) = d_theta``. The reconstruction is ``(theta, phi) -> (theta, phi + beta)``.
    """
    metric = catalog.sphere_chart()
    return CahProblem(
        source=metric,
        source_sub=catalog.equator(metric),
        target=metric,
        target_sub=catalog.equator(metric, -2.0 * math.pi, 2.0 * math.pi),
        maps=BundleMaps(
            phi=lambda u: np.asarray(u, dtype=float) + beta,
            psi_normal=_constant(np.eye(2)),
            phi_jacobian=lambda u: np.eye(1),
        ),
        mode=_mode(mode, ProblemMode.ISOMETRY),
        name=f"equator-rotation-{beta:.6g}",
    )


def _sphere_into_space(bundle_factory, name: str, mode: Any) -> CahProblem:
    source = catalog.sphere_chart()
    target = catalog.euclidean(3)
    psi_normal = np.zeros((3, 2))
    psi_normal[2, 0] = -1.0

    def psi_fiber(u: np.ndarray) -> np.ndarray:
        return -np.array([[math.cos(u[0])], [math.sin(u[0])], [0.0]])

    return CahProblem(
        source=source,
        source_sub=catalog.equator(source),
        target=target,
        target_sub=catalog.plane_circle(target),
        maps=BundleMaps(
            phi=lambda u: np.asarray(u, dtype=float),
            psi_normal=_constant(psi_normal),
            psi_fiber=psi_fiber,
            phi_jacobian=lambda u: np.eye(1),
        ),
        mode=_mode(mode, ProblemMode.IMMERSION),
        bundle=bundle_factory(source),
        name=name,
    )


def sphere_into_space(mode: Any = None) -> CahProblem:
    """
    Unit sphere chart with ``V`` the trivial line bundle and ``h = g`` into flat
    3-space. ``S~`` is the unit circle of the xy-plane, ``psi`` sends ``d_theta`` to
    ``-e_3`` and the fiber to the inward normal ``-(cos u, sin u, 0)``, so the
    reconstruction is the standard embedding.
    """
    return _sphere_into_space(
        lambda source: catalog.sphere_in_flat_bundle(source), "sphere-into-space", mode
    )


def gauss_violation(scale: float = 0.9, mode: Any = None) -> CahProblem:
    """
    :func:`sphere_into_space` with ``h = scale g``
    """
    return _sphere_into_space(
        lambda source: catalog.sphere_in_flat_bundle(source, scale),
        f"gauss-violation-{scale:g}",
        mode,
    )


def codazzi_bump(amplitude: float = 0.2, mode: Any = None) -> CahProblem:
    return _sphere_into_space(
        lambda source: catalog.codazzi_bump_bundle(source, amplitude),
        f"codazzi-bump-{amplitude:g}",
        mode,
    )


def radius_mismatch(radius: float = 1.1, mode: Any = None) -> CahProblem:
    """
    Unit sphere into the sphere of ``radius``, equator onto equator by arc length:
    ``phi(u) = u / radius`` and ``psi(d_theta) = d_theta / radius``
    """
    source = catalog.sphere_chart()
    target = catalog.sphere_chart(radius)
    psi_normal = np.zeros((2, 2))
    psi_normal[0, 0] = 1.0 / radius
    return CahProblem(
        source=source,
        source_sub=catalog.equator(source),
        target=target,
        target_sub=catalog.equator(target),
        maps=BundleMaps(
            phi=lambda u: np.asarray(u, dtype=float) / radius,
            psi_normal=_constant(psi_normal),
            phi_jacobian=lambda u: np.eye(1) / radius,
        ),
        mode=_mode(mode, ProblemMode.ISOMETRY),
        name=f"radius-mismatch-{radius:g}",
    )


def flattened_target(mode: Any = None) -> CahProblem:
    """
    Target sphere 1% flatter than the source
    """
    return radius_mismatch(1.01, mode)


def flat_rotation(beta: float = math.pi / 5.0, mode: Any = None) -> CahProblem:
    """
    Plane onto plane, first axis onto the line at angle ``beta``; the reconstruction is
    the rotation by ``beta``
    """
    source = catalog.euclidean(2)
    target = catalog.euclidean(2)
    cos, sin = math.cos(beta), math.sin(beta)
    psi_normal = np.array([[0.0, -sin], [0.0, cos]])
    return CahProblem(
        source=source,
        source_sub=catalog.axis_line(source),
        target=target,
        target_sub=catalog.line(target, [0.0, 0.0], [cos, sin], name="rotated-axis"),
        maps=BundleMaps(
            phi=lambda u: np.asarray(u, dtype=float),
            psi_normal=_constant(psi_normal),
            phi_jacobian=lambda u: np.eye(1),
        ),
        mode=_mode(mode, ProblemMode.ISOMETRY),
        name=f"flat-rotation-{beta:.6g}",
    )


def identity_flat(mode: Any = None) -> CahProblem:
    return flat_rotation(0.0, mode)


def cartan_strip(mode: Any = None) -> CahProblem:
    """
    Flat strip over its lower edge, onto itself; normal geodesics are vertical
    """
    metric = catalog.flat_strip()
    sub = catalog.boundary_line(metric)
    return CahProblem(
        source=metric,
        source_sub=sub,
        target=metric,
        target_sub=sub,
        maps=identity_maps(2),
        mode=_mode(mode, ProblemMode.CARTAN_ISOMETRY),
        name="cartan-strip",
    )


def ricci_plane(k: float = -2.0, mode: Any = None) -> CahProblem:
    """
    Plane with the rank-2 bundle of :func:`catalog.ricci_bundle` into flat 4-space,
    first axis onto the first axis, normal direction onto ``e_2`` and the fiber onto
    ``(e_3, e_4)``
    """
    source = catalog.euclidean(2)
    target = catalog.euclidean(4)
    psi_normal = np.zeros((4, 2))
    psi_normal[1, 1] = 1.0
    psi_fiber = np.zeros((4, 2))
    psi_fiber[2, 0] = psi_fiber[3, 1] = 1.0
    return CahProblem(
        source=source,
        source_sub=catalog.axis_line(source),
        target=target,
        target_sub=catalog.axis_line(target),
        maps=BundleMaps(
            phi=lambda u: np.asarray(u, dtype=float),
            psi_normal=_constant(psi_normal),
            psi_fiber=_constant(psi_fiber),
            phi_jacobian=lambda u: np.eye(1),
        ),
        mode=_mode(mode, ProblemMode.IMMERSION),
        bundle=catalog.ricci_bundle(source, k),
        name=f"ricci-plane-{k:g}",
    )


def with_maps(
    problem: CahProblem, maps: BundleMaps, validate_maps: bool = True
) -> CahProblem:
    """
    Same geometry with other bundle maps, e.g. a tabulated version
    """
    return CahProblem(
        source=problem.source,
        source_sub=problem.source_sub,
        target=problem.target,
        target_sub=problem.target_sub,
        maps=maps,
        mode=problem.mode,
        bundle=problem.bundle,
        name=problem.name,
        validate_maps=validate_maps,
    )


def scaled_psi(problem: CahProblem, factor: float) -> CahProblem:
    """
    ``psi`` multiplied by ``factor`` on the normal bundle and the fiber
    (no longer isometric unless ``factor`` is 1, so construction skips the map check)
    """
    maps = problem.maps
    psi_fiber = None
    if maps.psi_fiber is not None:
        psi_fiber = lambda u: factor * maps.psi_fiber_at(  # noqa: E731
            u, problem.rank, problem.target.dim
        )
    return with_maps(
        problem,
        BundleMaps(
            phi=maps.phi,
            psi_normal=lambda u: factor * maps.psi_normal_at(u),
            psi_fiber=psi_fiber,
            phi_jacobian=maps.phi_jacobian,
            eps_fd=maps.eps_fd,
        ),
        validate_maps=False,
    )


PROBLEMS: Dict[str, Callable[..., CahProblem]] = {
    "identity_sphere": identity_sphere,
    "equator_rotation": equator_rotation,
    "sphere_into_space": sphere_into_space,
    "radius_mismatch": radius_mismatch,
    "flattened_target": flattened_target,
    "flat_rotation": flat_rotation,
    "identity_flat": identity_flat,
    "cartan_strip": cartan_strip,
    "gauss_violation": gauss_violation,
    "codazzi_bump": codazzi_bump,
    "ricci_plane": ricci_plane,
}


MANIFOLDS: Dict[str, Callable[..., MetricField]] = {
    "euclidean": catalog.euclidean,
    "sphere_chart": catalog.sphere_chart,
    "hyperbolic_half_plane": catalog.hyperbolic_half_plane,
    "flat_strip": catalog.flat_strip,
}


def problem_names() -> List[str]:
    return sorted(PROBLEMS)


class ScenarioCatalog:
    """
    Named manifolds and problems. Entries are built on every lookup, so callers own
    what they get back.
    """

    def __init__(
        self,
        manifolds: Optional[Dict[str, Callable[..., MetricField]]] = None,
        problems: Optional[Dict[str, Callable[..., CahProblem]]] = None,
    ):
        self.manifolds = dict(MANIFOLDS if manifolds is None else manifolds)
        self.problems = dict(PROBLEMS if problems is None else problems)

    def register(self, name: str, factory: Callable[..., CahProblem]) -> None:
        self.problems[name] = factory

    def manifold_names(self) -> List[str]:
        return sorted(self.manifolds)

    def problem_names(self) -> List[str]:
        return sorted(self.problems)

    def manifold(self, name: str, **params: Any) -> MetricField:
        try:
            factory = self.manifolds[name]
        except KeyError as exc:
            raise UnknownScenario(
                f"Unknown manifold {name}, expected one of {self.manifold_names()}"
            ) from exc
        try:
            return factory(**params)
        except TypeError as exc:
            raise UnknownScenario(f"Invalid parameters {params} for {name}: {exc}") from exc

    def problem(
        self, name: str, table: Optional[Dict[str, Any]] = None, **params: Any
    ) -> CahProblem:
        """
        :param name: registry key, e.g. ``sphere_into_space``
        :param table: optional ``{"u", "phi", "psi_normal", "psi_fiber"}`` tables
            replacing the built-in bundle maps
        :param params: keyword arguments of the scenario factory
        :raises UnknownScenario: unknown name or parameters
        """
        try:
            factory = self.problems[name]
        except KeyError as exc:
            raise UnknownScenario(
                f"Unknown scenario {name}, expected one of {self.problem_names()}"
            ) from exc
        try:
            problem = factory(**params)
        except (TypeError, ValueError) as exc:
            raise UnknownScenario(f"Invalid parameters {params} for {name}: {exc}") from exc
        if table is not None:
            problem = with_maps(problem, TabulatedBundleMaps.from_dict(table))
        logger.debug("Built scenario %s", problem.name)
        return problem


default_catalog = ScenarioCatalog()


def get_problem(
    name: str, table: Optional[Dict[str, Any]] = None, **params: Any
) -> CahProblem:
    return default_catalog.problem(name, table, **params)
