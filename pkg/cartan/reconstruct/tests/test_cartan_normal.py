from unittest import TestCase

import numpy as np

from ...scenarios.oracles import oracle_rotation
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ..cartan_normal import cartan_normal_map, normal_coordinates
from ..exceptions import InvalidProblem
from ..reconstruct import reconstruct_map


class TestCartanNormalMap(ScenarioTestCaseMixin, TestCase):
    def test_strip(self):
        problem = self.get_problem("cartan_strip")
        x = np.array([1.0, 0.7])
        result = cartan_normal_map(problem, x, self.config.with_steps(200))
        self.assertArrayAlmostEqual(result.point, x, 1e-7)
        self.assertArrayAlmostEqual(result.f_point, x, 1e-7)
        self.assertArrayAlmostEqual(result.parameter, [1.0], 1e-8)
        self.assertAlmostEqual(result.length, 0.7, places=8)
        self.assertLess(result.tau.isometry_defect(), 1e-9)

    def test_normal_coordinates(self):
        problem = self.get_problem("cartan_strip")
        u, c = normal_coordinates(problem, np.array([-2.0, 1.5]), self.config.with_steps(200))
        self.assertArrayAlmostEqual(u, [-2.0], 1e-8)
        self.assertArrayAlmostEqual(np.abs(c), [1.5], 1e-8)

    def test_requires_cartan_mode(self):
        with self.assertRaises(InvalidProblem):
            cartan_normal_map(self.get_problem("identity_flat"), np.array([1.0, 0.5]))

    def test_agrees_with_general_reconstruction(self):
        beta = np.pi / 6.0
        problem = self.get_problem("equator_rotation", mode="cartan-isometry")
        general = self.get_problem("equator_rotation")
        config = self.config.with_steps(200)
        points = [
            np.array([theta, phi])
            for theta in (0.9, 1.2, 1.9, 2.3)
            for phi in (-2.0, -0.8, 0.3, 1.1, 2.4)
        ]
        for x in points:
            result = cartan_normal_map(problem, x, config)
            self.assertArrayAlmostEqual(result.f_point, oracle_rotation(x, beta), 1e-6)
            self.assertArrayAlmostEqual(result.parameter, [x[1]], 1e-6)
            self.assertAlmostEqual(result.length, abs(x[0] - np.pi / 2.0), delta=1e-6)
            self.assertArrayAlmostEqual(
                result.f_point, reconstruct_map(general, x, samples=201).f_point, 1e-6
            )
