from unittest import TestCase

import numpy as np

from ...geometry import frame_components
from ...scenarios import get_problem
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ...transport import CurvePath
from ..exceptions import GridMismatch, InvalidHomotopy
from ..family import FamilyInput, Homotopy
from ..finite_difference import (
    finite_difference_generalized_variation,
    finite_difference_variation,
)
from ..solvers import reduction_check, solve_variation_immersion, solve_variation_isometry

GRID = np.linspace(0.0, 1.0, 51)


def sphere_cone(problem) -> Homotopy:
    return Homotopy.cone(
        problem.source,
        problem.source_sub,
        lambda u: np.array([0.6 * u - 0.3]),
        np.array([1.2, 0.4]),
        base_derivative=lambda u: np.array([0.6]),
    )


def wide_cone(problem) -> Homotopy:
    return Homotopy.cone(
        problem.source,
        problem.source_sub,
        lambda u: np.array([0.6 * u - 0.3]),
        np.array([0.8, 0.9]),
        base_derivative=lambda u: np.array([0.6]),
    )


class TestHomotopy(ScenarioTestCaseMixin, TestCase):
    def test_start_must_lie_on_submanifold(self):
        problem = self.get_problem("identity_sphere")
        with self.assertRaises(InvalidHomotopy):
            Homotopy(
                problem.source,
                problem.source_sub,
                position=lambda u, t: np.array([1.0, 0.0]),
                base=lambda u: np.array([0.0]),
            )

    def test_cone(self):
        homotopy = sphere_cone(self.get_problem("identity_sphere"))
        self.assertArrayAlmostEqual(homotopy.point(0.5, 0.0), [np.pi / 2.0, 0.0])
        self.assertArrayAlmostEqual(homotopy.point(0.5, 1.0), [1.2, 0.4])
        self.assertArrayAlmostEqual(homotopy.tangent(0.5, 0.3), [1.2 - np.pi / 2.0, 0.4])
        curve = homotopy.slice(0.5, samples=11)
        self.assertEqual(curve.t.shape[0], 11)

    def test_between_curves(self):
        problem = self.get_problem("identity_sphere")
        end = np.array([1.2, 0.4])
        first = CurvePath.segment(problem.source, [np.pi / 2.0, -0.2], end, 21)
        start = np.array([np.pi / 2.0, 0.3])
        second = CurvePath.from_function(
            problem.source,
            lambda t: start + t * (end - start) + np.sin(np.pi * t) * np.array([-0.1, 0.0]),
            samples=21,
        )
        homotopy = Homotopy.between_curves(
            problem.source, problem.source_sub, first, second
        )
        for t in (0.0, 0.3, 1.0):
            self.assertArrayAlmostEqual(homotopy.point(0.0, t), first.position(t), 1e-12)
            self.assertArrayAlmostEqual(homotopy.point(1.0, t), second.position(t), 1e-12)
        self.assertArrayAlmostEqual(homotopy.point(0.5, 1.0), end, 1e-12)
        self.assertArrayAlmostEqual(homotopy.base_point(0.5), [0.05], 1e-9)
        self.assertLess(homotopy.start_offset(0.5), 1e-9)

        shifted = CurvePath.segment(problem.source, start, end + 0.1, 21)
        with self.assertRaises(InvalidHomotopy):
            Homotopy.between_curves(problem.source, problem.source_sub, first, shifted)

    def test_family_initial_data(self):
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.5)
        self.assertArrayAlmostEqual(family.theta, [0.6], 1e-12)
        self.assertArrayAlmostEqual(family.sigma, np.zeros((1, 1, 1)), 1e-12)
        self.assertArrayAlmostEqual(family.initial_variation(), [0.6, 0.0], 1e-12)
        self.assertArrayAlmostEqual(family.initial_rotation(), np.zeros((2, 2)), 1e-12)
        self.assertLess(family.parallel_residual(), 1e-8)


class TestIsometryVariation(ScenarioTestCaseMixin, TestCase):
    def test_flat_cone(self):
        problem = self.get_problem("identity_flat")
        homotopy = Homotopy.cone(
            problem.source,
            problem.source_sub,
            lambda u: np.array([u - 0.5]),
            np.array([0.3, 1.5]),
            base_derivative=lambda u: np.array([1.0]),
        )
        family = FamilyInput.build(homotopy, 0.2)
        trajectory = solve_variation_isometry(family, t_eval=GRID)
        # d_u Phi = (1 - t) theta'(u) in a constant frame
        for t, U in zip(trajectory.t, trajectory.U):
            self.assertArrayAlmostEqual(U, [1.0 - t, 0.0], 1e-10)
        self.assertArrayAlmostEqual(trajectory.X, np.zeros((51, 2, 2)), 1e-10)

    def test_matches_finite_differences(self):
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.5)
        trajectory = solve_variation_isometry(family, t_eval=GRID)
        reference = finite_difference_variation(family, samples=51)
        self.assertArrayAlmostEqual(trajectory.t, reference.t, 1e-12)
        self.assertArrayAlmostEqual(trajectory.U, reference.U, 1e-5)
        self.assertArrayAlmostEqual(trajectory.X, reference.X, 1e-5)
        self.assertArrayAlmostEqual(trajectory.U[0], [0.6, 0.0], 1e-10)

    def test_curvature_override(self):
        sphere = self.get_problem("identity_sphere").source
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.5)
        default = solve_variation_isometry(family, t_eval=GRID)
        same = solve_variation_isometry(
            family,
            curvature=lambda stage: frame_components(sphere.riemann(stage.point), stage.frame),
            t_eval=GRID,
        )
        self.assertArrayAlmostEqual(default.U, same.U, 1e-13)
        flat = solve_variation_isometry(
            family, curvature=lambda stage: np.zeros((2, 2, 2, 2)), t_eval=GRID
        )
        self.assertGreater(float(np.max(np.abs(flat.U - default.U))), 1e-4)

    def test_rows(self):
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.25)
        trajectory = solve_variation_isometry(family, t_eval=GRID)
        self.assertEqual(trajectory.header(), ["u", "t", "U_1", "U_2", "X_1_2"])
        rows = trajectory.rows()
        self.assertEqual(rows.shape, (51, 5))
        self.assertTrue(np.all(rows[:, 0] == 0.25))
        self.assertArrayAlmostEqual(trajectory.X[:, 0, 1], rows[:, 4], 1e-15)


class TestImmersionVariation(ScenarioTestCaseMixin, TestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        problem = get_problem("sphere_into_space")
        cls.family = FamilyInput.build(
            sphere_cone(problem),
            0.5,
            bundle=problem.working_bundle,
            target_lift=problem.target_lift(),
        )
        cls.isometry = solve_variation_isometry(cls.family, t_eval=GRID)
        cls.immersion = solve_variation_immersion(cls.family, t_eval=GRID)

    def test_reduction(self):
        report = reduction_check(self.immersion, self.isometry)
        self.assertTrue(report.passed, report.to_dict())
        self.assertEqual(self.immersion.split.total, 3)
        self.assertEqual(self.immersion.U.shape, (51, 3))

    def test_reduction_detects_wrong_h(self):
        report = reduction_check(self.immersion, self.isometry, 1.5 * self.immersion.h)
        self.assertFalse(report.passed)
        self.assertGreater(report.residuals["X_mixed"], 1e-3)
        self.assertFalse(report.to_dict()["passed"])

    def test_reduction_detects_gauss_violation(self):
        # h = 0.99 g, the sectional curvatures differ by about 2e-2
        problem = get_problem("gauss_violation", scale=0.99)
        family = FamilyInput.build(
            wide_cone(problem),
            0.5,
            bundle=problem.working_bundle,
            target_lift=problem.target_lift(),
        )
        isometry = solve_variation_isometry(family, t_eval=GRID)
        immersion = solve_variation_immersion(family, t_eval=GRID)
        report = reduction_check(immersion, isometry)
        self.assertFalse(report.passed)
        self.assertGreater(report.max_residual, 1e-3)

        compatible = get_problem("sphere_into_space")
        family = FamilyInput.build(
            wide_cone(compatible),
            0.5,
            bundle=compatible.working_bundle,
            target_lift=compatible.target_lift(),
        )
        report = reduction_check(
            solve_variation_immersion(family, t_eval=GRID),
            solve_variation_isometry(family, t_eval=GRID),
        )
        self.assertTrue(report.passed, report.to_dict())

    def test_grid_mismatch(self):
        other = solve_variation_isometry(self.family, t_eval=np.linspace(0.0, 1.0, 11))
        with self.assertRaises(GridMismatch):
            reduction_check(self.immersion, other)

    def test_matches_generalized_finite_differences(self):
        reference = finite_difference_generalized_variation(self.family, samples=51)
        self.assertArrayAlmostEqual(self.immersion.U, reference.U, 1e-4)


class TestVariationLimits(ScenarioTestCaseMixin, TestCase):
    def test_endpoint_fixed_family(self):
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.5)
        trajectory = solve_variation_isometry(family, t_eval=GRID)
        # every slice of the cone ends at the same point
        self.assertLess(float(np.linalg.norm(trajectory.U[-1])), 1e-6)

    def test_constant_family(self):
        problem = self.get_problem("identity_sphere")
        curve = CurvePath.segment(problem.source, [np.pi / 2.0, 0.1], [1.2, 0.4], 51)
        homotopy = Homotopy.constant(problem.source, problem.source_sub, curve)
        trajectory = solve_variation_isometry(FamilyInput.build(homotopy, 0.5), t_eval=GRID)
        self.assertArrayAlmostEqual(trajectory.U, np.zeros((51, 2)), 1e-14)
        self.assertArrayAlmostEqual(trajectory.X, np.zeros((51, 2, 2)), 1e-14)

    def test_immersion_without_fiber(self):
        problem = self.get_problem("identity_sphere")
        sphere = problem.source
        family = FamilyInput.build(
            sphere_cone(problem), 0.5, target_lift=problem.target_lift()
        )

        def source_curvature(stage):
            return frame_components(sphere.riemann(stage.point), stage.frame)

        isometry = solve_variation_isometry(family, source_curvature, t_eval=GRID)
        immersion = solve_variation_immersion(family, source_curvature, t_eval=GRID)
        self.assertEqual(immersion.split.total, 2)
        self.assertTrue(np.array_equal(immersion.U, isometry.U))
        self.assertTrue(np.array_equal(immersion.X, isometry.X))

        # target curvature along the identical development
        immersion = solve_variation_immersion(family, t_eval=GRID)
        self.assertArrayAlmostEqual(immersion.U, isometry.U, 1e-8)
        self.assertArrayAlmostEqual(immersion.X, isometry.X, 1e-8)
        self.assertTrue(reduction_check(immersion, isometry).passed)

    def test_finite_difference_order(self):
        family = FamilyInput.build(sphere_cone(self.get_problem("identity_sphere")), 0.5)
        coarse, middle, fine = (
            finite_difference_variation(family, delta=delta, samples=51).X
            for delta in (0.2, 0.1, 0.05)
        )
        # halving delta divides the error by four
        ratio = np.max(np.abs(coarse - middle)) / np.max(np.abs(middle - fine))
        self.assertGreater(ratio, 3.5)
        self.assertLess(ratio, 4.5)
