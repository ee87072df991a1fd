import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from ..constants import FD_RELATIVE_STEP, FD_SECOND_RELATIVE_STEP, RANK_TOLERANCE
from .exceptions import (
    DimensionMismatch,
    NotInFiber,
    NotTangentToSubmanifold,
    RankDeficientEmbedding,
)
from .linalg import central_difference, modified_gram_schmidt
from .metric import ChartBox, MetricField

logger = logging.getLogger(__name__)

TANGENCY_TOLERANCE = 1e-8
PROJECTION_SEEDS_PER_AXIS = 5


@dataclass(frozen=True, eq=False)
class SubmanifoldSpec:
    """
    Embedded submanifold ``S`` of dimension ``r`` given by ``u -> x(u)`` over a
    parameter box. ``r = 0`` describes a single point.
    """

    ambient: MetricField
    box: ChartBox
    embedding: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None  # n x r
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None  # n x r x r
    eps_fd: Optional[float] = None
    name: str = "submanifold"

    def __post_init__(self):
        if not 0 <= self.dim < self.ambient.dim:
            raise DimensionMismatch(
                f"{self.name}: dimension {self.dim} must be in [0, {self.ambient.dim})"
            )

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def codim(self) -> int:
        return self.ambient.dim - self.dim

    @property
    def fd_step(self) -> float:
        if self.eps_fd is not None:
            return self.eps_fd
        return FD_RELATIVE_STEP * self.box.diagonal

    def _raw_point(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.embedding(np.asarray(u, dtype=float)), dtype=float)

    def _raw_jacobian(self, u: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((self.ambient.dim, 0))
        if self.jacobian is not None:
            return np.asarray(self.jacobian(u), dtype=float).reshape(
                self.ambient.dim, self.dim
            )
        return central_difference(self._raw_point, u, self.fd_step).T

    def point(self, u: np.ndarray) -> np.ndarray:
        u = self.box.check(u, f"{self.name} parameters")
        return self.ambient.box.check(self._raw_point(u), self.name)

    def jacobian_at(self, u: np.ndarray) -> np.ndarray:
        u = self.box.check(u, f"{self.name} parameters")
        jacobian = self._raw_jacobian(u)
        if self.dim:
            singular_values = np.linalg.svd(jacobian, compute_uv=False)
            if singular_values[-1] <= RANK_TOLERANCE * max(1.0, singular_values[0]):
                raise RankDeficientEmbedding(
                    f"{self.name}: embedding jacobian has rank < {self.dim} at u={u}"
                )
        return jacobian

    def hessian_at(self, u: np.ndarray) -> np.ndarray:
        """
        :return: ``H[k, i, j] = d^2 x^k / du^i du^j``
        """
        u = self.box.check(u, f"{self.name} parameters")
        if self.dim == 0:
            return np.zeros((self.ambient.dim, 0, 0))
        if self.hessian is not None:
            return np.asarray(self.hessian(u), dtype=float)
        if self.jacobian is not None:
            derivative = central_difference(self._raw_jacobian, u, self.fd_step)
        else:
            derivative = central_difference(
                self._raw_jacobian, u, FD_SECOND_RELATIVE_STEP * self.box.diagonal
            )
        hessian = np.einsum("jki->kij", derivative)
        return 0.5 * (hessian + hessian.transpose(0, 2, 1))

    def _tangent_data(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = self.point(u)
        jacobian = self.jacobian_at(u)
        g = self.ambient.g(x)
        return x, jacobian, g

    def parameter_coefficients(self, u: np.ndarray, vector: np.ndarray) -> np.ndarray:
        """
        :return: ``a`` with ``J a`` the g-orthogonal projection of ``vector`` on T_xS
        """
        _, jacobian, g = self._tangent_data(u)
        return self.tangent_coefficients(jacobian, g, vector)

    @staticmethod
    def tangent_coefficients(
        jacobian: np.ndarray, g: np.ndarray, vector: np.ndarray
    ) -> np.ndarray:
        """
        :return: parameter coefficients of the g-orthogonal projection of ``vector``
        """
        if jacobian.shape[1] == 0:
            return np.zeros((0,) + np.shape(vector)[1:])
        return np.linalg.solve(jacobian.T @ g @ jacobian, jacobian.T @ g @ vector)

    def tangent_projector(self, u: np.ndarray) -> np.ndarray:
        _, jacobian, g = self._tangent_data(u)
        return jacobian @ self.tangent_coefficients(jacobian, g, np.eye(self.ambient.dim))

    def normal_projector(self, u: np.ndarray) -> np.ndarray:
        return np.eye(self.ambient.dim) - self.tangent_projector(u)

    def is_tangent(self, u: np.ndarray, vector: np.ndarray) -> bool:
        _, _, g = self._tangent_data(u)
        normal = self.normal_projector(u) @ vector
        scale = max(1.0, float(np.sqrt(vector @ g @ vector)))
        return float(np.sqrt(normal @ g @ normal)) <= TANGENCY_TOLERANCE * scale

    def is_normal(self, u: np.ndarray, vector: np.ndarray) -> bool:
        _, _, g = self._tangent_data(u)
        tangent = self.tangent_projector(u) @ vector
        scale = max(1.0, float(np.sqrt(vector @ g @ vector)))
        return float(np.sqrt(tangent @ g @ tangent)) <= TANGENCY_TOLERANCE * scale

    def adapted_frame(self, u: np.ndarray) -> np.ndarray:
        """
        g-orthonormal frame ``[T | N]`` at ``x(u)``: Gram-Schmidt of the jacobian
        columns, completed with the chart axes in index order.
        """
        _, jacobian, g = self._tangent_data(u)
        candidates = np.concatenate([jacobian, np.eye(self.ambient.dim)], axis=1)
        frame = modified_gram_schmidt(
            candidates, g, count=self.ambient.dim, dependency_tolerance=1e-8
        )
        return frame

    def sigma_tensor(self, u: np.ndarray) -> np.ndarray:
        """
        :return: ``sigma[k, i, j]``, chart components of ``sigma(d_i x, d_j x)``
        """
        x, jacobian, g = self._tangent_data(u)
        gamma = self.ambient.christoffel(x)
        acceleration = self.hessian_at(u) + np.einsum(
            "kpq,pi,qj->kij", gamma, jacobian, jacobian
        )
        projector = np.eye(self.ambient.dim) - jacobian @ self.tangent_coefficients(
            jacobian, g, np.eye(self.ambient.dim)
        )
        sigma = np.einsum("kl,lij->kij", projector, acceleration)
        return 0.5 * (sigma + sigma.transpose(0, 2, 1))

    def second_fundamental_form(
        self, u: np.ndarray, first: np.ndarray, second: np.ndarray
    ) -> np.ndarray:
        """
        :return: normal vector ``sigma(X, Y)`` in chart components
        :raises NotTangentToSubmanifold: if ``X`` or ``Y`` is not tangent to S
        """
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        for vector in (first, second):
            if not self.is_tangent(u, vector):
                raise NotTangentToSubmanifold(
                    f"{self.name}: {vector} is not tangent at u={u}"
                )
        coefficients = self.parameter_coefficients(u, np.stack([first, second], axis=1))
        return np.einsum(
            "kij,i,j->k", self.sigma_tensor(u), coefficients[:, 0], coefficients[:, 1]
        )

    def sigma_components(
        self, u: np.ndarray, frame: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """
        :param frame: ``[T | N]`` frame at x(u), the adapted frame by default
        :return: ``sigma[i, j, mu] = <sigma(T_i, T_j), N_mu>``
        """
        x, jacobian, g = self._tangent_data(u)
        frame = self.adapted_frame(u) if frame is None else frame
        tangent = frame[:, : self.dim]
        normal = frame[:, self.dim :]
        coefficients = self.tangent_coefficients(jacobian, g, tangent)
        sigma = np.einsum(
            "kpq,pi,qj->kij", self.sigma_tensor(u), coefficients, coefficients
        )
        return np.einsum("kij,kl,lm->ijm", sigma, g, normal)

    def normal_connection(
        self,
        u: np.ndarray,
        vector: np.ndarray,
        section: Callable[[np.ndarray], np.ndarray],
    ) -> np.ndarray:
        """
        Normal connection ``nabla^perp_X xi`` of a normal field given on parameters

        :param vector: X, tangent to S at x(u)
        :param section: u -> normal vector at x(u)
        """
        u = np.asarray(u, dtype=float)
        x, jacobian, g = self._tangent_data(u)
        if not self.is_tangent(u, vector):
            raise NotTangentToSubmanifold(f"{self.name}: {vector} is not tangent at u={u}")
        value = np.asarray(section(u), dtype=float)
        if value.shape != (self.ambient.dim,) or not self.is_normal(u, value):
            raise NotInFiber(f"{self.name}: section value {value} is not normal at u={u}")
        direction = self.tangent_coefficients(jacobian, g, vector)
        derivative = directional_derivative(section, u, direction, self.fd_step)
        covariant = derivative + np.einsum(
            "kpq,p,q->k", self.ambient.christoffel(x), vector, value
        )
        return self.normal_projector(u) @ covariant

    def project(self, x: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        Nearest point of S in chart distance

        :return: parameters of the nearest point and the chart distance to it
        """
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            parameters = np.zeros(0)
            return parameters, float(np.linalg.norm(self._raw_point(parameters) - x))

        span = self.box.upper - self.box.lower
        offsets = (np.arange(PROJECTION_SEEDS_PER_AXIS) + 0.5) / PROJECTION_SEEDS_PER_AXIS
        best_seed, best_distance = None, np.inf
        for index in itertools.product(range(PROJECTION_SEEDS_PER_AXIS), repeat=self.dim):
            seed = self.box.lower + offsets[list(index)] * span
            distance = np.linalg.norm(self._raw_point(seed) - x)
            if distance < best_distance:
                best_seed, best_distance = seed, distance

        bounds = (self.box.lower, self.box.upper)
        if np.any(span == 0):
            bounds = (-np.inf, np.inf)
        result = least_squares(
            lambda parameters: self._raw_point(parameters) - x,
            best_seed,
            jac=self._raw_jacobian,
            bounds=bounds,
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
        )
        parameters = np.clip(result.x, self.box.lower, self.box.upper)
        distance = float(np.linalg.norm(self._raw_point(parameters) - x))
        logger.debug("%s: projected %s at distance %.3e", self.name, x, distance)
        return parameters, distance


def directional_derivative(
    func: Callable[[np.ndarray], np.ndarray],
    u: np.ndarray,
    direction: np.ndarray,
    step: float,
) -> np.ndarray:
    """
    Central difference of ``func`` at ``u`` along ``direction``
    """
    length = float(np.linalg.norm(direction))
    if length == 0.0:
        return np.zeros_like(np.asarray(func(u), dtype=float))
    h = step / length
    forward = np.asarray(func(u + h * direction), dtype=float)
    backward = np.asarray(func(u - h * direction), dtype=float)
    return (forward - backward) / (2.0 * h)


def second_fundamental_form(
    sub: SubmanifoldSpec, u: np.ndarray, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    return sub.second_fundamental_form(np.asarray(u, dtype=float), first, second)


def normal_connection(
    sub: SubmanifoldSpec,
    u: np.ndarray,
    vector: np.ndarray,
    section: Callable[[np.ndarray], np.ndarray],
) -> np.ndarray:
    return sub.normal_connection(u, np.asarray(vector, dtype=float), section)
