import math
from unittest import TestCase

import numpy as np

from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ..exceptions import MetricNotPositiveDefinite, OutOfChartDomain
from ..metric import ChartBox, DerivativeMode, MetricField, frame_components


def polar_plane() -> MetricField:
    return MetricField(
        ChartBox(np.array([1.0, -math.pi]), np.array([3.0, math.pi])),
        lambda x: np.diag([1.0, x[0] ** 2]),
        name="polar",
    )


class TestMetricField(ScenarioTestCaseMixin, TestCase):
    def test_euclidean_christoffel(self):
        for x in self.plane.box.sample(self.rng(), 5):
            self.assertArrayAlmostEqual(self.plane.christoffel(x), np.zeros((2, 2, 2)))
            self.assertArrayAlmostEqual(self.plane.riemann(x), np.zeros((2, 2, 2, 2)))

    def test_polar_christoffel(self):
        metric = polar_plane()
        self.assertEqual(metric.derivative_mode, DerivativeMode.FINITE_DIFFERENCE)
        gamma = metric.christoffel(np.array([2.0, 0.3]))
        self.assertAlmostEqual(gamma[0, 1, 1], -2.0, delta=1e-7)
        self.assertAlmostEqual(gamma[1, 0, 1], 0.5, delta=1e-7)
        self.assertAlmostEqual(gamma[1, 1, 0], 0.5, delta=1e-7)
        self.assertAlmostEqual(gamma[0, 0, 0], 0.0, delta=1e-7)

    def test_sphere_christoffel(self):
        theta = math.pi / 3.0
        gamma = self.sphere.christoffel(np.array([theta, 0.2]))
        self.assertAlmostEqual(gamma[0, 1, 1], -math.sin(theta) * math.cos(theta), places=12)
        self.assertAlmostEqual(gamma[1, 0, 1], math.cos(theta) / math.sin(theta), places=12)

    def test_sphere_curvature(self):
        x = np.array([math.pi / 2.0, 0.0])
        curvature = self.sphere.riemann(x)
        # R(X, Y, Z, W) = <R(Z, W) X, Y>
        self.assertAlmostEqual(curvature[0, 1, 0, 1], -1.0, places=10)
        self.assertAlmostEqual(curvature[0, 1, 1, 0], 1.0, places=10)
        self.assertAlmostEqual(
            self.sphere.sectional_curvature(x, np.array([1.0, 0.0]), np.array([0.0, 1.0])),
            1.0,
            places=10,
        )
        theta = 1.0
        curvature = self.sphere.riemann(np.array([theta, 0.5]))
        self.assertAlmostEqual(curvature[0, 1, 0, 1], -math.sin(theta) ** 2, places=10)

    def test_hyperbolic_curvature(self):
        curvature = self.hyperbolic.sectional_curvature(
            np.array([0.0, 1.0]), np.array([1.0, 0.0]), np.array([0.3, 2.0])
        )
        self.assertAlmostEqual(curvature, -1.0, places=9)

    def test_curvature_symmetries(self):
        for metric in (self.sphere, self.hyperbolic, polar_plane()):
            for x in metric.box.sample(self.rng(3), 20, margin=0.05):
                R = metric.riemann(x)
                scale = max(1.0, float(np.max(np.abs(R))))
                tolerance = 1e-5 * scale
                self.assertArrayAlmostEqual(R, -R.transpose(1, 0, 2, 3), tolerance)
                self.assertArrayAlmostEqual(R, -R.transpose(0, 1, 3, 2), tolerance)
                self.assertArrayAlmostEqual(R, R.transpose(2, 3, 0, 1), tolerance)
                bianchi = (
                    R + np.einsum("cbda->abcd", R) + np.einsum("dbac->abcd", R)
                )
                self.assertArrayAlmostEqual(bianchi, np.zeros_like(R), tolerance)
                gamma = metric.christoffel(x)
                self.assertArrayAlmostEqual(gamma, gamma.transpose(0, 2, 1), 1e-12)

    def test_finite_difference_mode(self):
        numeric = self.sphere.with_finite_differences()
        self.assertEqual(numeric.derivative_mode, DerivativeMode.FINITE_DIFFERENCE)
        for x in self.sphere.box.sample(self.rng(5), 5, margin=0.1):
            self.assertArrayAlmostEqual(numeric.dg(x), self.sphere.dg(x), 1e-8)
            self.assertArrayAlmostEqual(
                numeric.christoffel(x), self.sphere.christoffel(x), 1e-7
            )
            self.assertArrayAlmostEqual(numeric.riemann(x), self.sphere.riemann(x), 1e-3)

    def test_frame_components(self):
        x = np.array([1.0, 0.0])
        frame = np.diag([1.0, 1.0 / math.sin(1.0)])
        components = frame_components(self.sphere.riemann(x), frame)
        self.assertAlmostEqual(components[0, 1, 0, 1], -1.0, places=10)

    def test_domain_errors(self):
        with self.assertRaises(OutOfChartDomain):
            self.sphere.g(np.array([0.1, 0.0]))
        with self.assertRaises(OutOfChartDomain):
            self.sphere.christoffel(np.array([1.0, 7.0]))

        indefinite = MetricField(
            ChartBox(np.array([-1.0, -1.0]), np.array([1.0, 1.0])),
            lambda x: np.diag([1.0, -1.0]),
        )
        with self.assertRaises(MetricNotPositiveDefinite):
            indefinite.g(np.zeros(2))

    def test_chart_box(self):
        box = ChartBox(np.array([0.0, 1.0]), np.array([2.0, 3.0]))
        self.assertEqual(box.dim, 2)
        self.assertArrayAlmostEqual(box.center, [1.0, 2.0])
        self.assertTrue(box.contains(np.array([2.0, 3.0])))
        self.assertFalse(box.contains(np.array([2.1, 3.0])))
        self.assertFalse(box.contains(np.array([np.nan, 2.0])))
        samples = box.sample(self.rng(), 50, margin=0.25)
        self.assertTrue(np.all(samples[:, 0] >= 0.5) and np.all(samples[:, 0] <= 1.5))
