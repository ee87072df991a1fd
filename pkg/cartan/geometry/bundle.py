import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import DimensionMismatch, GeometryException, NotInFiber
from .linalg import central_difference, modified_gram_schmidt
from .metric import MetricField
from .submanifold import SubmanifoldSpec, directional_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrameSplit:
    """
    Index split of an ``n + s`` frame: tangent indices first, then normal ones
    """

    tangent_count: int
    normal_count: int = 0

    def __post_init__(self):
        if self.tangent_count < 1 or self.normal_count < 0:
            raise DimensionMismatch(
                f"Invalid split n={self.tangent_count} s={self.normal_count}"
            )

    @property
    def total(self) -> int:
        return self.tangent_count + self.normal_count

    @property
    def tangent(self) -> slice:
        return slice(0, self.tangent_count)

    @property
    def normal(self) -> slice:
        return slice(self.tangent_count, self.total)


@dataclass(frozen=True, eq=False)
class BundleData:
    """
    Riemannian vector bundle ``(V, h_V, D)`` of rank ``s`` over the chart of ``base``
    in a local trivialisation ``f_1 .. f_s``, plus a V-valued symmetric tensor ``h``.

    - ``fiber_metric(x)[alpha, beta] = h_V(f_alpha, f_beta)``
    - ``connection(x)[c, alpha, beta]``: ``D_{d_c} f_beta = C[c, alpha, beta] f_alpha``
    - ``h_tensor(x)[a, b, alpha]``: ``h(d_a, d_b) = h[a, b, alpha] f_alpha``
    """

    base: MetricField
    rank: int
    fiber_metric: Callable[[np.ndarray], np.ndarray]
    connection: Callable[[np.ndarray], np.ndarray]
    h_tensor: Callable[[np.ndarray], np.ndarray]
    connection_derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    h_derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fiber_metric_derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "bundle"

    def __post_init__(self):
        if self.rank < 0:
            raise DimensionMismatch(f"{self.name}: negative rank {self.rank}")

    @property
    def dim(self) -> int:
        return self.base.dim

    def _checked(self, x: np.ndarray) -> np.ndarray:
        return self.base.box.check(x, self.name)

    def _raw_connection(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.connection(x), dtype=float).reshape(
            self.dim, self.rank, self.rank
        )

    def _raw_h(self, x: np.ndarray) -> np.ndarray:
        h = np.asarray(self.h_tensor(x), dtype=float).reshape(
            self.dim, self.dim, self.rank
        )
        return 0.5 * (h + h.transpose(1, 0, 2))

    def _raw_fiber_metric(self, x: np.ndarray) -> np.ndarray:
        metric = np.asarray(self.fiber_metric(x), dtype=float).reshape(
            self.rank, self.rank
        )
        return 0.5 * (metric + metric.T)

    def metric_at(self, x: np.ndarray) -> np.ndarray:
        x = self._checked(x)
        metric = self._raw_fiber_metric(x)
        if self.rank:
            try:
                np.linalg.cholesky(metric)
            except np.linalg.LinAlgError as exc:
                raise GeometryException(
                    f"{self.name}: fiber metric not positive definite at {x}"
                ) from exc
        return metric

    def connection_at(self, x: np.ndarray) -> np.ndarray:
        return self._raw_connection(self._checked(x))

    def h_at(self, x: np.ndarray) -> np.ndarray:
        return self._raw_h(self._checked(x))

    def orthonormal_frame(self, x: np.ndarray) -> np.ndarray:
        """
        :return: fiber components of an h_V-orthonormal frame, Gram-Schmidt of ``f_alpha``
        """
        return modified_gram_schmidt(np.eye(self.rank), self.metric_at(x))

    def connection_derivative_at(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``dC[e, c, alpha, beta]``
        """
        x = self._checked(x)
        if self.connection_derivative is not None:
            return np.asarray(self.connection_derivative(x), dtype=float)
        return central_difference(self._raw_connection, x, self.base.fd_step)

    def h_derivative_at(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``dh[c, a, b, alpha]``
        """
        x = self._checked(x)
        if self.h_derivative is not None:
            return np.asarray(self.h_derivative(x), dtype=float)
        return central_difference(self._raw_h, x, self.base.fd_step)

    def fiber_metric_derivative_at(self, x: np.ndarray) -> np.ndarray:
        x = self._checked(x)
        if self.fiber_metric_derivative is not None:
            return np.asarray(self.fiber_metric_derivative(x), dtype=float)
        return central_difference(self._raw_fiber_metric, x, self.base.fd_step)

    def covariant_derivative(
        self,
        x: np.ndarray,
        vector: np.ndarray,
        value: np.ndarray,
        derivative: np.ndarray,
    ) -> np.ndarray:
        """
        ``D_X eta`` from the value of ``eta`` at ``x`` and its directional derivative
        """
        return derivative + np.einsum("c,cab,b->a", vector, self.connection_at(x), value)

    def curvature_operator(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``m[c, d]``, matrix of ``R^V(d_c, d_d)`` acting on fiber components
        """
        connection = self.connection_at(x)
        derivative = self.connection_derivative_at(x)
        return (
            derivative
            - derivative.transpose(1, 0, 2, 3)
            + np.einsum("cab,dbg->cdag", connection, connection)
            - np.einsum("dab,cbg->cdag", connection, connection)
        )

    def curvature(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``RV[alpha, beta, c, d] = h_V(R^V(d_c, d_d) f_alpha, f_beta)``
        """
        return np.einsum(
            "cdga,gb->abcd", self.curvature_operator(x), self.metric_at(x)
        )

    def h_covariant_derivative(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``Dh[c, a, b, alpha] = (D_{d_c} h)(d_a, d_b)`` in fiber components
        """
        gamma = self.base.christoffel(x)
        h = self.h_at(x)
        return (
            self.h_derivative_at(x)
            + np.einsum("cxy,aby->cabx", self.connection_at(x), h)
            - np.einsum("eca,ebx->cabx", gamma, h)
            - np.einsum("ecb,aex->cabx", gamma, h)
        )

    def h_vector(self, x: np.ndarray, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        return np.einsum("a,b,abx->x", first, second, self.h_at(x))

    def shape_operator(self, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """
        ``A_eta`` as a chart matrix, solving ``<A_eta X, Y> = h_V(h(X, Y), eta)``
        """
        eta = np.asarray(eta, dtype=float)
        if eta.shape != (self.rank,):
            raise NotInFiber(f"{self.name}: fiber vector must have {self.rank} components")
        pairing = np.einsum("abx,xy,y->ab", self.h_at(x), self.metric_at(x), eta)
        return np.linalg.solve(self.base.g(x), pairing)

    def compatibility_residual(self, x: np.ndarray) -> float:
        """
        Max deviation of ``d h_V(f_a, f_b)`` from ``h_V(D f_a, f_b) + h_V(f_a, D f_b)``
        """
        metric = self.metric_at(x)
        connection = self.connection_at(x)
        expected = np.einsum("cga,gb->cab", connection, metric) + np.einsum(
            "ag,cgb->cab", metric, connection
        )
        if not expected.size:
            return 0.0
        return float(np.max(np.abs(self.fiber_metric_derivative_at(x) - expected)))


def shape_operator(
    bundle: BundleData, metric: MetricField, x: np.ndarray, eta: np.ndarray
) -> np.ndarray:
    if metric.dim != bundle.dim:
        raise DimensionMismatch(
            f"Metric of dimension {metric.dim} for a bundle over dimension {bundle.dim}"
        )
    eta = np.asarray(eta, dtype=float)
    pairing = np.einsum("abx,xy,y->ab", bundle.h_at(x), bundle.metric_at(x), eta)
    return np.linalg.solve(metric.g(x), pairing)


def direct_sum_connection(
    sub: SubmanifoldSpec,
    bundle: BundleData,
    u: np.ndarray,
    vector: np.ndarray,
    section: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Connection ``D~`` on ``T^perp S + V`` along S:
    ``D~_X xi = nabla^perp_X xi + h(X, xi)`` and
    ``D~_X eta = D_X eta - (A_eta X)^perp``.

    :param vector: X, tangent to S at x(u)
    :param section: u -> (normal vector, fiber components)
    :return: normal part and fiber part of ``D~_X (xi, eta)``
    """
    u = np.asarray(u, dtype=float)
    vector = np.asarray(vector, dtype=float)
    x = sub.point(u)
    normal_value, fiber_value = (np.asarray(part, dtype=float) for part in section(u))
    if fiber_value.shape != (bundle.rank,):
        raise NotInFiber(
            f"Fiber part must have {bundle.rank} components, got {fiber_value.shape}"
        )

    normal_derivative = sub.normal_connection(u, vector, lambda p: section(p)[0])
    direction = sub.parameter_coefficients(u, vector)
    fiber_derivative = directional_derivative(
        lambda p: section(p)[1], u, direction, sub.fd_step
    )
    projector = sub.normal_projector(u)
    normal_part = normal_derivative - projector @ (
        bundle.shape_operator(x, fiber_value) @ vector
    )
    fiber_part = bundle.covariant_derivative(
        x, vector, fiber_value, fiber_derivative
    ) + bundle.h_vector(x, vector, normal_value)
    return normal_part, fiber_part
