import math
from unittest import TestCase

import numpy as np

from ...scenarios import catalog
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ..bundle import BundleData, FrameSplit, direct_sum_connection, shape_operator
from ..exceptions import DimensionMismatch, NotInFiber


class TestBundleData(ScenarioTestCaseMixin, TestCase):
    def test_frame_split(self):
        split = FrameSplit(2, 1)
        self.assertEqual(split.total, 3)
        self.assertEqual(list(range(3))[split.normal], [2])
        with self.assertRaises(DimensionMismatch):
            FrameSplit(0, 1)

    def test_sphere_normal_data(self):
        bundle = catalog.sphere_in_flat_bundle(self.sphere)
        for x in self.sphere.box.sample(self.rng(1), 5, margin=0.1):
            self.assertArrayAlmostEqual(bundle.shape_operator(x, np.ones(1)), np.eye(2))
            self.assertArrayAlmostEqual(
                bundle.h_covariant_derivative(x), np.zeros((2, 2, 2, 1)), 1e-10
            )
            self.assertAlmostEqual(bundle.compatibility_residual(x), 0.0)
            self.assertArrayAlmostEqual(bundle.curvature(x), np.zeros((1, 1, 2, 2)))

    def test_zero_h_shape_operator(self):
        bundle = catalog.flat_bundle(self.plane, 2)
        self.assertArrayAlmostEqual(
            shape_operator(bundle, self.plane, np.zeros(2), np.array([1.0, -2.0])),
            np.zeros((2, 2)),
        )

    def test_shape_operator_pairing(self):
        rng = self.rng(7)
        h = rng.normal(size=(2, 2, 2))
        h = 0.5 * (h + h.transpose(1, 0, 2))
        bundle = catalog.flat_bundle(self.hyperbolic, 2, h)
        x = np.array([0.3, 1.7])
        eta = rng.normal(size=2)
        first, second = rng.normal(size=2), rng.normal(size=2)
        operator = bundle.shape_operator(x, eta)
        self.assertAlmostEqual(
            self.hyperbolic.inner(x, operator @ first, second),
            float(bundle.h_vector(x, first, second) @ eta),
            places=10,
        )
        with self.assertRaises(NotInFiber):
            bundle.shape_operator(x, np.ones(3))

    def test_ricci_bundle_curvature(self):
        for k in (-2.0, 0.5):
            bundle = catalog.ricci_bundle(self.plane, k)
            curvature = bundle.curvature(np.array([0.3, 0.2]))
            self.assertAlmostEqual(curvature[0, 1, 0, 1], k, places=12)
            self.assertAlmostEqual(curvature[0, 1, 1, 0], -k, places=12)
            self.assertAlmostEqual(curvature[0, 0, 0, 1], 0.0, places=12)
            self.assertAlmostEqual(bundle.compatibility_residual(np.array([0.3, 0.2])), 0.0)

    def test_codazzi_bump_is_not_symmetric(self):
        bundle = catalog.codazzi_bump_bundle(self.sphere, 0.2)
        derivative = bundle.h_covariant_derivative(np.array([math.pi / 2.0 + 0.2, 0.0]))
        self.assertGreater(abs(derivative[0, 1, 1, 0] - derivative[1, 0, 1, 0]), 1e-3)

        flat = catalog.codazzi_bump_bundle(self.sphere, 0.0)
        derivative = flat.h_covariant_derivative(np.array([math.pi / 2.0 + 0.2, 0.0]))
        self.assertArrayAlmostEqual(derivative, np.zeros((2, 2, 2, 1)), 1e-7)

    def test_incompatible_connection(self):
        bundle = BundleData(
            self.plane,
            rank=2,
            fiber_metric=lambda x: np.eye(2),
            connection=lambda x: np.array([np.diag([1.0, 0.0]), np.zeros((2, 2))]),
            h_tensor=lambda x: np.zeros((2, 2, 2)),
        )
        self.assertAlmostEqual(bundle.compatibility_residual(np.zeros(2)), 2.0, places=8)

    def test_direct_sum_connection(self):
        h = np.zeros((2, 2, 1))
        h[:, :, 0] = [[0.0, 0.5], [0.5, 0.0]]
        bundle = catalog.flat_bundle(self.plane, 1, h)
        axis = catalog.axis_line(self.plane)
        u = np.array([0.4])
        vector = np.array([1.0, 0.0])

        normal, fiber = direct_sum_connection(
            axis, bundle, u, vector, lambda p: (np.array([0.0, 1.0]), np.zeros(1))
        )
        self.assertArrayAlmostEqual(normal, np.zeros(2))
        self.assertArrayAlmostEqual(fiber, [0.5])

        normal, fiber = direct_sum_connection(
            axis, bundle, u, vector, lambda p: (np.zeros(2), np.ones(1))
        )
        self.assertArrayAlmostEqual(normal, [0.0, -0.5])
        self.assertArrayAlmostEqual(fiber, [0.0])

        with self.assertRaises(NotInFiber):
            direct_sum_connection(
                axis, bundle, u, vector, lambda p: (np.zeros(2), np.ones(2))
            )
