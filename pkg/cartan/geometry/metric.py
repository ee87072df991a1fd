import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from ..constants import DOMAIN_SLACK, FD_RELATIVE_STEP, FD_SECOND_RELATIVE_STEP
from .exceptions import (
    DimensionMismatch,
    GeometryException,
    MetricNotPositiveDefinite,
    OutOfChartDomain,
)
from .linalg import central_difference

logger = logging.getLogger(__name__)


class DerivativeMode(Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True, eq=False)
class ChartBox:
    """
    Closed axis-aligned box of chart coordinates
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DimensionMismatch(
                "Box bounds must be vectors of the same length, "
                f"got {lower.shape} and {upper.shape}"
            )
        if np.any(upper < lower):
            raise GeometryException(f"Empty box lower={lower} upper={upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def empty(cls) -> "ChartBox":
        return cls(np.zeros(0), np.zeros(0))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: np.ndarray, slack: float = DOMAIN_SLACK) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != self.lower.shape or not np.all(np.isfinite(x)):
            return False
        return bool(np.all(x >= self.lower - slack) and np.all(x <= self.upper + slack))

    def check(self, x: np.ndarray, label: str = "chart") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != self.lower.shape:
            raise DimensionMismatch(
                f"{label}: expected a point of dimension {self.dim}, got shape {x.shape}"
            )
        if not self.contains(x):
            raise OutOfChartDomain(f"{label}: point {x} outside of box", point=x)
        return x

    def sample(
        self, rng: np.random.Generator, count: int, margin: float = 0.0
    ) -> np.ndarray:
        """
        :param margin: fraction of every side kept free at both ends
        :return: ``count`` uniform points, one per row
        """
        span = self.upper - self.lower
        low = self.lower + margin * span
        high = self.upper - margin * span
        return low + (high - low) * rng.random((count, self.dim))


@dataclass(frozen=True, eq=False)
class MetricField:
    """
    Riemannian metric on a single chart box. Derivatives come from the analytic
    callbacks when supplied and from central differences otherwise.

    Lowered curvature follows ``R(X, Y, Z, W) = <R(Z, W) X, Y>`` with
    ``R(Z, W) = nabla_Z nabla_W - nabla_W nabla_Z - nabla_[Z, W]``.
    """

    box: ChartBox
    components: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None  # dg[c, a, b]
    second_derivative: Optional[
        Callable[[np.ndarray], np.ndarray]
    ] = None  # d2g[e, c, a, b]
    eps_fd: Optional[float] = None
    name: str = "metric"

    def __post_init__(self):
        if self.box.dim < 1:
            raise DimensionMismatch("A metric needs dimension n >= 1")
        if self.eps_fd is not None and not self.eps_fd > 0:
            raise GeometryException(f"eps_fd must be positive, got {self.eps_fd}")

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def derivative_mode(self) -> DerivativeMode:
        if self.derivative is None:
            return DerivativeMode.FINITE_DIFFERENCE
        return DerivativeMode.ANALYTIC

    @property
    def fd_step(self) -> float:
        if self.eps_fd is not None:
            return self.eps_fd
        return FD_RELATIVE_STEP * self.box.diagonal

    @property
    def fd_second_step(self) -> float:
        return FD_SECOND_RELATIVE_STEP * self.box.diagonal

    def with_finite_differences(self, eps_fd: Optional[float] = None) -> "MetricField":
        """
        :return: the same metric with analytic derivatives dropped
        """
        return MetricField(
            self.box, self.components, eps_fd=eps_fd, name=f"{self.name}-fd"
        )

    def contains(self, x: np.ndarray) -> bool:
        return self.box.contains(x)

    def _raw_components(self, x: np.ndarray) -> np.ndarray:
        g = np.asarray(self.components(x), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise DimensionMismatch(
                f"{self.name}: components must be {self.dim}x{self.dim}, got {g.shape}"
            )
        return 0.5 * (g + g.T)

    def _fd_derivative(self, x: np.ndarray) -> np.ndarray:
        return central_difference(self._raw_components, x, self.fd_step)

    def g(self, x: np.ndarray) -> np.ndarray:
        x = self.box.check(x, self.name)
        g = self._raw_components(x)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise MetricNotPositiveDefinite(
                f"{self.name}: metric not positive definite at {x}"
            ) from exc
        return g

    def inverse(self, x: np.ndarray) -> np.ndarray:
        return np.linalg.inv(self.g(x))

    def dg(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``dg[c, a, b] = d g_ab / d x^c``
        """
        x = self.box.check(x, self.name)
        if self.derivative is not None:
            return np.asarray(self.derivative(x), dtype=float)
        return self._fd_derivative(x)

    def d2g(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``d2g[e, c, a, b] = d^2 g_ab / d x^e d x^c``
        """
        x = self.box.check(x, self.name)
        if self.second_derivative is not None:
            return np.asarray(self.second_derivative(x), dtype=float)
        if self.derivative is not None:
            d2g = central_difference(
                lambda y: np.asarray(self.derivative(y), dtype=float), x, self.fd_step
            )
        else:
            d2g = central_difference(self._fd_derivative, x, self.fd_second_step)
        return 0.5 * (d2g + d2g.transpose(1, 0, 2, 3))

    def inner(self, x: np.ndarray, first: np.ndarray, second: np.ndarray) -> float:
        return float(np.asarray(first) @ self.g(x) @ np.asarray(second))

    def norm(self, x: np.ndarray, vector: np.ndarray) -> float:
        return float(np.sqrt(self.inner(x, vector, vector)))

    def christoffel(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``gamma[a, b, c]`` = Gamma^a_bc
        """
        gamma, _ = self._christoffel_with_lowered(self.g(x), self.dg(x))
        return gamma

    @staticmethod
    def _christoffel_with_lowered(
        g: np.ndarray, dg: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        lowered = 0.5 * (
            np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
        )  # Gamma_dbc
        gamma = np.einsum("ad,dbc->abc", np.linalg.inv(g), lowered)
        return 0.5 * (gamma + gamma.transpose(0, 2, 1)), lowered

    def christoffel_derivative(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``dgamma[e, a, b, c]`` = d Gamma^a_bc / d x^e
        """
        g = self.g(x)
        dg = self.dg(x)
        d2g = self.d2g(x)
        ginv = np.linalg.inv(g)
        _, lowered = self._christoffel_with_lowered(g, dg)
        dginv = -np.einsum("ap,epq,qd->ead", ginv, dg, ginv)
        dlowered = 0.5 * (
            np.einsum("ebdc->edbc", d2g) + np.einsum("ecdb->edbc", d2g) - d2g
        )
        return np.einsum("ead,dbc->eabc", dginv, lowered) + np.einsum(
            "ad,edbc->eabc", ginv, dlowered
        )

    def riemann_operator(self, x: np.ndarray) -> np.ndarray:
        """
        :return: ``r[a, b, c, d]`` with ``R(d_c, d_d) d_b = r[a, b, c, d] d_a``
        """
        gamma = self.christoffel(x)
        dgamma = self.christoffel_derivative(x)
        return (
            np.einsum("cadb->abcd", dgamma)
            - np.einsum("dacb->abcd", dgamma)
            + np.einsum("ace,edb->abcd", gamma, gamma)
            - np.einsum("ade,ecb->abcd", gamma, gamma)
        )

    def riemann(self, x: np.ndarray) -> np.ndarray:
        """
        :return: lowered curvature ``R[a, b, c, d] = <R(d_c, d_d) d_a, d_b>``
        """
        return np.einsum("be,eacd->abcd", self.g(x), self.riemann_operator(x))

    def sectional_curvature(
        self, x: np.ndarray, first: np.ndarray, second: np.ndarray
    ) -> float:
        g = self.g(x)
        area = (first @ g @ first) * (second @ g @ second) - (first @ g @ second) ** 2
        if area <= 0:
            raise GeometryException("Sectional curvature needs independent vectors")
        curvature = np.einsum(
            "abcd,a,b,c,d->", self.riemann(x), first, second, first, second
        )
        return float(-curvature / area)


def christoffel(metric: MetricField, x: np.ndarray) -> np.ndarray:
    return metric.christoffel(x)


def riemann(metric: MetricField, x: np.ndarray) -> np.ndarray:
    return metric.riemann(x)


def sectional_curvature(
    metric: MetricField, x: np.ndarray, first: np.ndarray, second: np.ndarray
) -> float:
    return metric.sectional_curvature(x, np.asarray(first), np.asarray(second))


def frame_components(tensor: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """
    Components of a covariant 4-tensor on the columns of ``frame``
    """
    return np.einsum(
        "pqrs,pa,qb,rc,sd->abcd", tensor, frame, frame, frame, frame
    )
