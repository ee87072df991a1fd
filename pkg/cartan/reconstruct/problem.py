import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..constants import MAP_ISOMETRY_TOLERANCE, MAP_SAMPLE_FRACTIONS, SNAP_TOLERANCE
from ..geometry import BundleData, FrameSplit, MetricField, SubmanifoldSpec
from ..geometry.linalg import gram_drift
from ..transport import Development
from ..variation import TargetLift
from .exceptions import InvalidProblem, NotOnSubmanifold
from .maps import BundleMaps

logger = logging.getLogger(__name__)


class ProblemMode(Enum):
    ISOMETRY = "isometry"
    IMMERSION = "immersion"
    CARTAN_ISOMETRY = "cartan-isometry"
    CARTAN_IMMERSION = "cartan-immersion"

    @property
    def is_immersion(self) -> bool:
        return self in (ProblemMode.IMMERSION, ProblemMode.CARTAN_IMMERSION)

    @property
    def is_cartan(self) -> bool:
        return self in (ProblemMode.CARTAN_ISOMETRY, ProblemMode.CARTAN_IMMERSION)


@dataclass(frozen=True, eq=False)
class CahProblem:
    """
    Source ``(M, S, V)``, target ``(M~, S~)`` and the bundle maps along S. The target
    has dimension ``n`` in isometry modes and ``n + s`` in immersion modes.
    """

    source: MetricField
    source_sub: SubmanifoldSpec
    target: MetricField
    target_sub: SubmanifoldSpec
    maps: BundleMaps
    mode: ProblemMode = ProblemMode.ISOMETRY
    bundle: Optional[BundleData] = None
    name: str = "problem"
    validate_maps: bool = True

    def __post_init__(self):
        n = self.source.dim
        if self.source_sub.ambient.dim != n or self.target_sub.ambient.dim != self.target.dim:
            raise InvalidProblem(f"{self.name}: submanifolds do not live in their manifolds")
        if self.source_sub.dim != self.target_sub.dim:
            raise InvalidProblem(
                f"{self.name}: S has dimension {self.source_sub.dim}, "
                f"S~ has dimension {self.target_sub.dim}"
            )
        if self.mode.is_immersion and self.bundle is None:
            raise InvalidProblem(f"{self.name}: immersion modes need a bundle")
        if self.bundle is not None and self.bundle.dim != n:
            raise InvalidProblem(f"{self.name}: bundle base has dimension {self.bundle.dim}")
        expected = n + self.rank
        if self.target.dim != expected:
            raise InvalidProblem(
                f"{self.name}: target must have dimension {expected} in {self.mode.value} "
                f"mode, got {self.target.dim}"
            )
        if self.validate_maps:
            self._validate_maps()

    def _validate_maps(self):
        """
        ``phi_* + psi`` must send an orthonormal frame of ``T_x M`` (and of the fiber)
        to an orthonormal frame of the target, checked at a few points of S
        """
        box = self.source_sub.box
        if box.dim:
            parameters = [
                box.lower + fraction * (box.upper - box.lower)
                for fraction in MAP_SAMPLE_FRACTIONS
            ]
        else:
            parameters = [np.zeros(0)]
        for u in parameters:
            target_point, target_frame = self.lift(u, *self.initial_frames(u))
            drift = gram_drift(target_frame, self.target.g(target_point))
            if drift > MAP_ISOMETRY_TOLERANCE:
                raise InvalidProblem(
                    f"{self.name}: bundle maps are not isometric at u={u}, "
                    f"Gramian drift {drift:.3e}"
                )
        logger.debug("%s: bundle maps isometric at %d points", self.name, len(parameters))

    @property
    def dim(self) -> int:
        return self.source.dim

    @property
    def rank(self) -> int:
        if self.mode.is_immersion and self.bundle is not None:
            return self.bundle.rank
        return 0

    @property
    def split(self) -> FrameSplit:
        return FrameSplit(self.dim, self.rank)

    @property
    def working_bundle(self) -> Optional[BundleData]:
        """
        The bundle when it takes part in the construction (immersion modes)
        """
        return self.bundle if self.mode.is_immersion else None

    def snap(self, x: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        :return: S parameters of the point of S closest to ``x`` and the distance
        :raises NotOnSubmanifold: ``x`` is farther than the snap tolerance from S
        """
        u, distance = self.source_sub.project(x)
        if distance > SNAP_TOLERANCE:
            raise NotOnSubmanifold(
                f"{self.name}: point {x} is {distance:.3e} away from {self.source_sub.name}",
                distance=distance,
            )
        return u, distance

    def target_point(self, u: np.ndarray) -> np.ndarray:
        return self.target_sub.point(self.maps.phi_at(u))

    def phi_pushforward(self, u: np.ndarray) -> np.ndarray:
        """
        ``N x n`` chart matrix of ``phi_* o (tangent projection)`` at ``x(u)``
        """
        u = np.asarray(u, dtype=float)
        source_jacobian = self.source_sub.jacobian_at(u)
        g = self.source.g(self.source_sub.point(u))
        coefficients = self.source_sub.tangent_coefficients(
            source_jacobian, g, np.eye(self.dim)
        )
        target_jacobian = self.target_sub.jacobian_at(self.maps.phi_at(u))
        return target_jacobian @ self.maps.phi_jacobian_at(u) @ coefficients

    def psi_tilde(self, u: np.ndarray) -> np.ndarray:
        """
        ``N x n`` chart matrix of ``phi_* + psi`` on ``T_x M`` for ``x = x(u)``
        """
        u = np.asarray(u, dtype=float)
        normal = self.maps.psi_normal_at(u).reshape(self.target.dim, self.dim)
        return self.phi_pushforward(u) + normal @ self.source_sub.normal_projector(u)

    def psi_fiber(self, u: np.ndarray) -> np.ndarray:
        return self.maps.psi_fiber_at(u, self.rank, self.target.dim)

    def lift(
        self, u: np.ndarray, frame: np.ndarray, fiber_frame: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Target point and frame ``[psi~ e_a | psi f_alpha]`` for source frames at ``x(u)``
        """
        u = np.asarray(u, dtype=float)
        columns = [self.psi_tilde(u) @ frame]
        if self.rank:
            columns.append(self.psi_fiber(u) @ fiber_frame)
        return self.target_point(u), np.concatenate(columns, axis=1)

    def target_lift(self) -> TargetLift:
        return TargetLift(metric=self.target, lift=self.lift)

    def initial_frames(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Adapted frame of S at ``x(u)`` and orthonormal fiber frame (immersion modes)
        """
        frame = self.source_sub.adapted_frame(u)
        if not self.rank:
            return frame, np.zeros((0, 0))
        return frame, self.bundle.orthonormal_frame(self.source_sub.point(u))

    def transported_isomorphism(
        self,
        source_point: np.ndarray,
        source_frame: np.ndarray,
        fiber_frame: np.ndarray,
        development: Development,
    ) -> "TransportedIsomorphism":
        """
        ``tau = D_0^1(gamma~) o (phi_* + psi) o P_1^0(gamma)`` in chart bases, read off
        the final frames: ``E_a(1) -> E~_a(1)`` and ``F_alpha(1) -> E~_alpha(1)``
        """
        n = self.dim
        source_gram = self.source.g(source_point)
        if self.rank:
            fiber_gram = self.bundle.metric_at(source_point)
        else:
            fiber_gram = np.zeros((0, 0))
            fiber_frame = np.zeros((0, 0))
        final = development.final_frame
        return TransportedIsomorphism(
            source_point=np.asarray(source_point, dtype=float),
            target_point=development.endpoint,
            tangent=final[:, :n] @ source_frame.T @ source_gram,
            fiber=final[:, n:] @ fiber_frame.T @ fiber_gram,
            source_gram=source_gram,
            fiber_gram=fiber_gram,
            target_gram=self.target.g(development.endpoint),
        )


@dataclass(frozen=True, eq=False)
class TransportedIsomorphism:
    """
    ``tau_gamma`` in chart bases: ``tangent`` maps ``T_{gamma(1)} M`` and ``fiber``
    maps fiber components of ``V_{gamma(1)}`` into ``T_{gamma~(1)} M~``.
    """

    source_point: np.ndarray
    target_point: np.ndarray
    tangent: np.ndarray  # (N, n)
    fiber: np.ndarray  # (N, s)
    source_gram: np.ndarray
    fiber_gram: np.ndarray
    target_gram: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.concatenate([self.tangent, self.fiber], axis=1)

    def isometry_defect(self) -> float:
        """
        ``max |tau^T G~ tau - (G + h_V)|``
        """
        n, s = self.tangent.shape[1], self.fiber.shape[1]
        expected = np.zeros((n + s, n + s))
        expected[:n, :n] = self.source_gram
        expected[n:, n:] = self.fiber_gram
        pulled = self.matrix.T @ self.target_gram @ self.matrix
        return float(np.max(np.abs(pulled - expected)))

    def frame_defect(self) -> float:
        """
        Gram drift of the image of a source orthonormal frame
        """
        factor = np.linalg.cholesky(np.linalg.inv(self.source_gram))
        return gram_drift(self.tangent @ factor, self.target_gram)
