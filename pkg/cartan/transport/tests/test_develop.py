import math
from unittest import TestCase

import numpy as np

from ...geometry import FrameSplit
from ...integrate import IntegratorConfig, ReorthoPolicy
from ...scenarios import catalog
from ...scenarios.oracles import (
    oracle_geodesic,
    oracle_great_circle,
    oracle_holonomy_sphere,
    oracle_hyperbolic_vertical,
    oracle_sphere_embedding,
)
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ..curves import CurvePath, HProfile, VelocityProfile
from ..develop import (
    anti_develop,
    develop,
    development_residual,
    generalized_develop,
    generalized_transport,
    parallel_transport,
    standard_frame,
    transport_frames,
)
from ..exceptions import DevelopmentNotExisting, NonOrthonormalFrame


def latitude_loop(metric, theta: float, samples: int = 1001) -> CurvePath:
    return CurvePath.from_function(
        metric,
        lambda t: np.array([theta, 2.0 * math.pi * t]),
        velocity=lambda t: np.array([0.0, 2.0 * math.pi]),
        acceleration=lambda t: np.zeros(2),
        samples=samples,
    )


class TestParallelTransport(ScenarioTestCaseMixin, TestCase):
    def test_sphere_holonomy(self):
        for theta in (math.pi / 6.0, math.pi / 4.0, math.pi / 3.0):
            curve = latitude_loop(self.sphere, theta)
            frames = transport_frames(curve, standard_frame(self.sphere, curve.start))
            final = frames[-1]
            # components of the transported d_theta in (d_theta, d_phi / sin theta)
            angle = math.atan2(final[1, 0] * math.sin(theta), final[0, 0])
            expected = oracle_holonomy_sphere(theta) % (2.0 * math.pi)
            difference = (angle - expected + math.pi) % (2.0 * math.pi) - math.pi
            self.assertAlmostEqual(difference, 0.0, delta=1e-8)

    def test_norm_preserved(self):
        curve = CurvePath.segment(self.sphere, [1.0, 0.0], [1.4, 2.0])
        vectors = np.array([[1.0, 0.5], [0.0, 1.0]])
        transported = parallel_transport(curve, vectors, config=self.config)
        gram_start = vectors.T @ self.sphere.g(curve.start) @ vectors
        gram_end = transported.T @ self.sphere.g(curve.end) @ transported
        self.assertArrayAlmostEqual(gram_start, gram_end, 1e-10)

        single = parallel_transport(curve, vectors[:, 0])
        self.assertEqual(single.shape, (2,))
        self.assertArrayAlmostEqual(single, transported[:, 0], 1e-12)

    def test_flat_transport_is_trivial(self):
        curve = CurvePath.from_function(
            self.plane, lambda t: np.array([math.cos(3 * t), t ** 2]), samples=101
        )
        vector = np.array([0.3, -1.2])
        self.assertArrayAlmostEqual(parallel_transport(curve, vector), vector, 1e-12)

    def test_holonomy_convergence_order(self):
        theta = math.pi / 3.0
        # 50 grid intervals, so the RK4 step count is set by ``steps`` alone
        curve = latitude_loop(self.sphere, theta, samples=51)
        frame = standard_frame(self.sphere, curve.start)
        expected = oracle_holonomy_sphere(theta)

        def error(steps: int) -> float:
            config = IntegratorConfig(steps=steps, reortho_policy=ReorthoPolicy.NEVER)
            final = transport_frames(curve, frame, config)[-1]
            angle = math.atan2(final[1, 0] * math.sin(theta), final[0, 0])
            return abs((angle - expected + math.pi) % (2.0 * math.pi) - math.pi)

        coarse, fine = error(50), error(100)
        self.assertLess(fine, 1e-6)
        self.assertGreater(math.log2(coarse / fine), 3.9)

    def test_random_curves_keep_frames_orthonormal(self):
        rng = self.rng(7)
        for metric, margin in ((self.sphere, 0.1), (self.hyperbolic, 0.25)):
            for _ in range(5):
                start, end = metric.box.sample(rng, 2, margin=margin)
                curve = CurvePath.segment(metric, start, end, samples=101)
                frames = transport_frames(curve, standard_frame(metric, start))
                for point, frame in zip(curve.points, frames):
                    drift = np.max(np.abs(frame.T @ metric.g(point) @ frame - np.eye(2)))
                    self.assertLess(drift, 1e-8)

    def test_frames_stay_orthonormal(self):
        curve = latitude_loop(self.sphere, 0.8)
        frames = transport_frames(curve, standard_frame(self.sphere, curve.start))
        self.assertEqual(frames.shape, (curve.t.shape[0], 2, 2))
        for point, frame in zip(curve.points[::50], frames[::50]):
            self.assertArrayAlmostEqual(frame.T @ self.sphere.g(point) @ frame, np.eye(2), 1e-8)


class TestDevelop(ScenarioTestCaseMixin, TestCase):
    def test_geodesic_matches_oracle(self):
        p = np.array([1.0, 0.3])
        frame = standard_frame(self.sphere, p)
        components = np.array([0.4, -0.7])
        development = develop(
            self.sphere, p, frame, VelocityProfile.constant(p, frame, components)
        )
        expected = oracle_geodesic(self.sphere, p, frame @ components, 1.0)
        self.assertArrayAlmostEqual(development.endpoint, expected, 1e-8)
        self.assertLess(development.max_gram_drift(), 1e-8)

    def test_great_circle(self):
        theta, phi, heading, length = 1.0, 0.3, 2.0, 1.2
        p = np.array([theta, phi])
        frame = standard_frame(self.sphere, p)
        components = length * np.array([-math.cos(heading), math.sin(heading)])
        development = develop(
            self.sphere, p, frame, VelocityProfile.constant(p, frame, components)
        )
        self.assertArrayAlmostEqual(
            oracle_sphere_embedding(development.endpoint),
            oracle_great_circle(theta, phi, heading, length),
            1e-8,
        )

    def test_hyperbolic_vertical(self):
        p = np.array([0.5, 1.0])
        frame = standard_frame(self.hyperbolic, p)
        development = develop(
            self.hyperbolic, p, frame, VelocityProfile.constant(p, frame, [0.0, 1.5])
        )
        self.assertArrayAlmostEqual(
            development.endpoint, oracle_hyperbolic_vertical(p, 1.5), 1e-8
        )

    def test_development_not_existing(self):
        p = np.array([0.0, 1.0])
        frame = standard_frame(self.hyperbolic, p)
        with self.assertRaises(DevelopmentNotExisting) as context:
            develop(self.hyperbolic, p, frame, VelocityProfile.constant(p, frame, [0.0, -5.0]))
        exit_time = math.log(1.0 / 0.05) / 5.0
        self.assertGreater(context.exception.exit_time, exit_time - 1e-6)
        self.assertLessEqual(context.exception.exit_time, exit_time + 1e-9)

    def test_non_orthonormal_frame(self):
        p = np.array([1.0, 0.0])
        with self.assertRaises(NonOrthonormalFrame):
            develop(self.sphere, p, np.eye(2), VelocityProfile.constant(p, np.eye(2), [1, 0]))

    def test_round_trip(self):
        curve = CurvePath.segment(self.sphere, [1.0, 0.2], [1.5, 1.0], samples=201)
        profile = anti_develop(curve, config=self.config)
        self.assertEqual(profile.values.shape, (201, 2))
        development = develop(
            self.sphere, curve.start, profile.frame, profile, t_eval=curve.t
        )
        self.assertArrayAlmostEqual(development.points, curve.points, 1e-6)
        self.assertLess(development_residual(development, profile), 1e-5)

    def test_anti_development_of_geodesic_is_constant(self):
        p = np.array([0.9, -0.4])
        frame = standard_frame(self.sphere, p)
        components = np.array([0.3, 0.5])
        development = develop(
            self.sphere,
            p,
            frame,
            VelocityProfile.constant(p, frame, components),
            t_eval=np.linspace(0.0, 1.0, 101),
        )
        profile = anti_develop(development.curve, frame)
        for value in profile.values:
            self.assertArrayAlmostEqual(value, components, 1e-5)

    def test_fixed_step_is_deterministic(self):
        p = np.array([1.2, 0.0])
        frame = standard_frame(self.sphere, p)
        profile = VelocityProfile.from_function(
            p, frame, lambda t: np.array([math.sin(2 * t), 1.0 - t])
        )
        config = IntegratorConfig(steps=300)
        first = develop(self.sphere, p, frame, profile, config)
        second = develop(self.sphere, p, frame, profile, config)
        self.assertTrue(np.array_equal(first.frames, second.frames))
        self.assertTrue(np.array_equal(first.points, second.points))


class TestGeneralizedDevelop(ScenarioTestCaseMixin, TestCase):
    def test_without_normal_part(self):
        p = np.array([1.1, 0.2])
        frame = standard_frame(self.sphere, p)
        profile = VelocityProfile.constant(p, frame, [0.2, 0.6])
        split = FrameSplit(2, 0)
        plain = develop(self.sphere, p, frame, profile, IntegratorConfig(steps=200))
        general = generalized_develop(
            self.sphere,
            p,
            frame,
            split,
            profile,
            HProfile.zero(split),
            IntegratorConfig(steps=200),
        )
        self.assertArrayAlmostEqual(plain.points, general.points, 1e-14)

    def test_circle_in_space(self):
        space = catalog.euclidean(3)
        split = FrameSplit(2, 1)
        h = np.zeros((2, 2, 1))
        h[:, :, 0] = np.eye(2)
        p = np.zeros(3)
        frame = np.eye(3)
        profile = VelocityProfile.constant(p, frame, [math.pi, 0.0])
        development = generalized_develop(
            space, p, frame, split, profile, HProfile.constant(split, h)
        )
        self.assertArrayAlmostEqual(development.endpoint, [0.0, 0.0, 2.0], 1e-9)
        self.assertArrayAlmostEqual(
            development.final_frame, np.diag([-1.0, 1.0, -1.0]), 1e-9
        )
        self.assertLess(development.max_gram_drift(), 1e-9)
        transport = development.transport_matrix(1.0)
        self.assertArrayAlmostEqual(generalized_transport(development, 1.0), transport, 1e-15)
        self.assertArrayAlmostEqual(transport @ frame[:, 0], [-1.0, 0.0, 0.0], 1e-9)

    def test_zero_h_with_normal_part(self):
        p = np.array([1.1, 0.2])
        frame = standard_frame(self.sphere, p)
        split = FrameSplit(1, 1)
        config = IntegratorConfig(steps=200)
        plain = develop(
            self.sphere,
            p,
            frame,
            VelocityProfile.from_function(p, frame, lambda t: np.array([0.5 + t, 0.0])),
            config,
        )
        general = generalized_develop(
            self.sphere,
            p,
            frame,
            split,
            VelocityProfile.from_function(p, frame, lambda t: np.array([0.5 + t])),
            HProfile.zero(split),
            config,
        )
        self.assertArrayAlmostEqual(plain.points, general.points, 1e-10)
        self.assertArrayAlmostEqual(plain.frames, general.frames, 1e-10)

    def test_transport_is_parallel_without_h(self):
        p = np.array([1.1, 0.2])
        frame = standard_frame(self.sphere, p)
        split = FrameSplit(1, 1)
        development = generalized_develop(
            self.sphere,
            p,
            frame,
            split,
            VelocityProfile.from_function(p, frame, lambda t: np.array([0.8 + t])),
            HProfile.zero(split),
            t_eval=np.linspace(0.0, 1.0, 1001),
        )
        vectors = np.array([[1.0, 0.3], [-0.2, 0.7]])
        for t in (0.5, 1.0):
            transported = parallel_transport(development.curve, vectors, t1=t)
            self.assertArrayAlmostEqual(
                generalized_transport(development, t) @ vectors, transported, 1e-7
            )

    def test_basis_independence(self):
        space = catalog.euclidean(3)
        split = FrameSplit(2, 1)
        h = np.zeros((2, 2, 1))
        h[:, :, 0] = [[1.0, 0.3], [0.3, -0.5]]
        components = np.array([1.0, 0.4])
        p = np.zeros(3)
        frame = np.eye(3)
        development = generalized_develop(
            space,
            p,
            frame,
            split,
            VelocityProfile.constant(p, frame, components),
            HProfile.constant(split, h),
        )

        angle = 0.7
        rotation = np.array(
            [[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]]
        )
        change = np.zeros((3, 3))
        change[:2, :2] = rotation
        change[2, 2] = -1.0
        rotated_frame = frame @ change
        # components of v and h in the new frame
        rotated_h = -np.einsum("ai,bj,abx->ijx", rotation, rotation, h)
        rotated = generalized_develop(
            space,
            p,
            rotated_frame,
            split,
            VelocityProfile.constant(p, rotated_frame, rotation.T @ components),
            HProfile.constant(split, rotated_h),
        )
        self.assertArrayAlmostEqual(rotated.endpoint, development.endpoint, 1e-9)
        self.assertArrayAlmostEqual(
            rotated.final_frame, development.final_frame @ change, 1e-9
        )

    def test_full_circle_closes(self):
        space = catalog.euclidean(3)
        split = FrameSplit(2, 1)
        h = np.zeros((2, 2, 1))
        h[:, :, 0] = np.eye(2)
        p = np.zeros(3)
        frame = np.eye(3)
        development = generalized_develop(
            space,
            p,
            frame,
            split,
            VelocityProfile.constant(p, frame, [2.0 * math.pi, 0.0]),
            HProfile.constant(split, h),
            t_eval=np.linspace(0.0, 1.0, 5),
        )
        # unit circle in the (e_1, e_3) plane, half way round at t = 1/2
        self.assertArrayAlmostEqual(development.points[2], [0.0, 0.0, 2.0], 1e-8)
        self.assertArrayAlmostEqual(development.endpoint, p, 1e-6)
        self.assertArrayAlmostEqual(development.final_frame, frame, 1e-6)
