import logging

import numpy as np

from ...integrate import IntegratorConfig
from .. import catalog, problems

logger = logging.getLogger(__name__)


_cached_data = {
    "sphere": None,  # Metric callbacks are cheap, scenarios are shared between cases
    "problems": {},
}


class ScenarioTestCaseMixin:
    sphere = None
    hyperbolic = None
    plane = None
    config: IntegratorConfig = None

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        if _cached_data["sphere"] is None:
            _cached_data["sphere"] = catalog.sphere_chart()
        cls.sphere = _cached_data["sphere"]
        cls.hyperbolic = catalog.hyperbolic_half_plane()
        cls.plane = catalog.euclidean(2)
        cls.config = IntegratorConfig()

    def get_problem(self, name: str, **params):
        key = (name, tuple(sorted(params.items())))
        problem = _cached_data["problems"].get(key)
        if problem is None:
            problem = problems.get_problem(name, **params)
            _cached_data["problems"][key] = problem
        return problem

    def rng(self, seed: int = 0) -> np.random.Generator:
        return np.random.default_rng(seed)

    def assertArrayAlmostEqual(self, first, second, tolerance: float = 1e-8, msg=None):
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        self.assertEqual(first.shape, second.shape, msg)
        difference = float(np.max(np.abs(first - second))) if first.size else 0.0
        self.assertLess(difference, tolerance, msg)
