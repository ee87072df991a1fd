import math
from unittest import TestCase

import numpy as np

from ...geometry import FrameSplit
from ...geometry.exceptions import OutOfChartDomain
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ..curves import CurvePath, HProfile, VelocityProfile
from ..exceptions import DegenerateGrid, InvalidProfile


class TestCurvePath(ScenarioTestCaseMixin, TestCase):
    def test_segment(self):
        curve = CurvePath.segment(self.plane, [0.0, 1.0], [2.0, -1.0], samples=11)
        self.assertArrayAlmostEqual(curve.start, [0.0, 1.0])
        self.assertArrayAlmostEqual(curve.end, [2.0, -1.0])
        self.assertArrayAlmostEqual(curve.velocity(0.3), [2.0, -2.0])
        self.assertArrayAlmostEqual(curve.acceleration(0.3), [0.0, 0.0])

    def test_sampled_curve_uses_spline(self):
        t = np.linspace(0.0, 1.0, 201)
        points = np.stack([np.sin(t), t ** 2], axis=1)
        curve = CurvePath.from_samples(self.plane, t, points)
        self.assertArrayAlmostEqual(
            curve.position(0.4321), [math.sin(0.4321), 0.4321 ** 2], 1e-9
        )
        self.assertArrayAlmostEqual(curve.velocity(0.5), [math.cos(0.5), 1.0], 1e-6)

    def test_finite_difference_derivatives(self):
        curve = CurvePath.from_function(
            self.plane, lambda t: np.array([math.cos(t), math.sin(t)]), samples=11
        )
        self.assertArrayAlmostEqual(curve.velocity(0.2), [-math.sin(0.2), math.cos(0.2)], 1e-8)
        self.assertArrayAlmostEqual(
            curve.acceleration(0.2), [-math.cos(0.2), -math.sin(0.2)], 1e-6
        )

    def test_reparameterize(self):
        curve = CurvePath.segment(self.plane, [0.0, 0.0], [1.0, 0.0], samples=21)
        slower = curve.reparameterize(lambda t: t ** 2, lambda t: 2 * t, lambda t: 2.0)
        self.assertArrayAlmostEqual(slower.position(0.5), [0.25, 0.0])
        self.assertArrayAlmostEqual(slower.velocity(0.5), [1.0, 0.0])
        self.assertArrayAlmostEqual(slower.acceleration(0.5), [2.0, 0.0])

    def test_invalid_grids(self):
        with self.assertRaises(DegenerateGrid):
            CurvePath.from_samples(self.plane, [0.0], [[0.0, 0.0]])
        with self.assertRaises(DegenerateGrid):
            CurvePath.from_samples(self.plane, [0.0, 0.6, 0.5, 1.0], np.zeros((4, 2)))
        with self.assertRaises(DegenerateGrid):
            CurvePath.from_samples(self.plane, [0.0, 0.5], np.zeros((2, 2)))
        with self.assertRaises(OutOfChartDomain):
            CurvePath.segment(self.sphere, [1.0, 0.0], [3.1, 0.0])


class TestProfiles(ScenarioTestCaseMixin, TestCase):
    def test_constant_velocity(self):
        frame = np.diag([1.0, 2.0])
        profile = VelocityProfile.constant(np.zeros(2), frame, [1.0, 1.0])
        self.assertEqual(profile.size, 2)
        self.assertArrayAlmostEqual(profile.vector(0.7), [1.0, 2.0])
        self.assertArrayAlmostEqual(profile.derivative(0.7), [0.0, 0.0])

    def test_sampled_velocity(self):
        t = np.linspace(0.0, 1.0, 51)
        values = np.stack([t, t ** 2], 1)
        profile = VelocityProfile.from_samples(np.zeros(2), np.eye(2), t, values)
        self.assertArrayAlmostEqual(profile(0.55), [0.55, 0.3025], 1e-9)
        with self.assertRaises(InvalidProfile):
            VelocityProfile(np.zeros(2), np.eye(2))

    def test_h_profile(self):
        split = FrameSplit(2, 1)
        self.assertEqual(HProfile.zero(split)(0.3).shape, (2, 2, 1))
        asymmetric = np.zeros((2, 2, 1))
        asymmetric[0, 1, 0] = 1.0
        with self.assertRaises(InvalidProfile):
            HProfile.constant(split, asymmetric)(0.0)
        with self.assertRaises(InvalidProfile):
            HProfile.constant(split, np.zeros((2, 2, 2)))(0.0)
        t = np.linspace(0.0, 1.0, 5)
        with self.assertRaises(InvalidProfile):
            HProfile.from_samples(split, t, np.zeros((5, 2, 2, 1)) + asymmetric)
