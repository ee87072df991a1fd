import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from ..constants import FD_RELATIVE_STEP
from ..geometry.linalg import central_difference
from .exceptions import InvalidProblem

logger = logging.getLogger(__name__)

ParameterMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BundleMaps:
    """
    Data of the bundle maps along S, all functions of the S parameters ``u``:

    - ``phi(u)``: parameters of ``phi(x(u))`` on S~
    - ``psi_normal(u)``: ``N x n`` chart matrix of ``psi`` on ``T^perp S`` (it is
      applied after the normal projection, tangent columns are ignored)
    - ``psi_fiber(u)``: ``N x s`` matrix sending fiber components to ``T^perp S~``
    - ``phi_jacobian(u)``: ``d phi / du``, central differences when missing
    """

    phi: ParameterMap
    psi_normal: ParameterMap
    psi_fiber: Optional[ParameterMap] = None
    phi_jacobian: Optional[ParameterMap] = None
    eps_fd: float = FD_RELATIVE_STEP

    def __post_init__(self):
        for name in ("phi", "psi_normal", "psi_fiber", "phi_jacobian"):
            value = getattr(self, name)
            if value is not None and not callable(value):
                raise InvalidProblem(f"Bundle map {name} must be callable")
        if self.phi is None or self.psi_normal is None:
            raise InvalidProblem("Bundle maps need phi and psi_normal")
        if not self.eps_fd > 0.0:
            raise InvalidProblem(f"Difference step must be positive, got {self.eps_fd}")

    def phi_at(self, u: np.ndarray) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.phi(np.asarray(u, dtype=float)), dtype=float))

    def phi_jacobian_at(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.phi_jacobian is not None:
            jacobian = np.asarray(self.phi_jacobian(u), dtype=float)
            return jacobian.reshape(-1, u.shape[0])
        # central_difference stacks the derivative on the leading axis
        return central_difference(self.phi_at, u, self.eps_fd).T

    def psi_normal_at(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.psi_normal(np.asarray(u, dtype=float)), dtype=float)

    def psi_fiber_at(self, u: np.ndarray, rank: int, size: int) -> np.ndarray:
        if self.psi_fiber is None:
            if rank:
                raise InvalidProblem("Bundle maps without psi on the fiber")
            return np.zeros((size, 0))
        return np.asarray(self.psi_fiber(np.asarray(u, dtype=float)), dtype=float).reshape(
            size, rank
        )


class TabulatedBundleMaps(BundleMaps):
    """
    Bundle maps of a curve S (r = 1) given as tables on a u-grid, interpolated by
    cubic splines
    """

    @classmethod
    def from_table(
        cls,
        grid: np.ndarray,
        phi: np.ndarray,
        psi_normal: np.ndarray,
        psi_fiber: Optional[np.ndarray] = None,
    ) -> "TabulatedBundleMaps":
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or grid.shape[0] < 2 or not np.all(np.diff(grid) > 0):
            raise InvalidProblem("Table grid must be strictly increasing with 2+ points")
        phi = np.asarray(phi, dtype=float).reshape(grid.shape[0], -1)
        psi_normal = np.asarray(psi_normal, dtype=float)
        if psi_normal.ndim != 3 or psi_normal.shape[0] != grid.shape[0]:
            raise InvalidProblem("psi_normal table must have shape (K, N, n)")
        phi_spline = CubicSpline(grid, phi, axis=0)
        normal_spline = CubicSpline(grid, psi_normal, axis=0)
        fiber_spline = None
        if psi_fiber is not None:
            psi_fiber = np.asarray(psi_fiber, dtype=float)
            if psi_fiber.ndim != 3 or psi_fiber.shape[0] != grid.shape[0]:
                raise InvalidProblem("psi_fiber table must have shape (K, N, s)")
            fiber_spline = CubicSpline(grid, psi_fiber, axis=0)

        def first(u: np.ndarray) -> float:
            return float(np.asarray(u, dtype=float).reshape(-1)[0])

        logger.debug("Tabulated bundle maps on %d grid points", grid.shape[0])
        return cls(
            phi=lambda u: phi_spline(first(u)),
            psi_normal=lambda u: normal_spline(first(u)),
            psi_fiber=(lambda u: fiber_spline(first(u))) if fiber_spline else None,
            phi_jacobian=lambda u: phi_spline(first(u), 1).reshape(-1, 1),
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TabulatedBundleMaps":
        """
        ``{"u": [...], "phi": [...], "psi_normal": [...], "psi_fiber": [...]}``
        """
        return cls.from_table(
            data["u"],
            data["phi"],
            data["psi_normal"],
            data.get("psi_fiber"),
        )
