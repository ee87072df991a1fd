import math
from unittest import TestCase

import numpy as np

from ...scenarios import get_problem, scaled_psi
from ...scenarios.tests.scenario_test_case import ScenarioTestCaseMixin
from ...transport import CurvePath
from ..checks import (
    check_bundle_maps,
    check_codazzi,
    check_gauss,
    check_isometry_curvature,
    check_ricci,
    default_conditions,
    run_checks,
)
from ..exceptions import ConditionNotApplicable, NoUsableCurve
from ..report import Condition
from ..sampling import index_tuples, sample_curves

SAMPLES = 101


def sphere_curves(problem):
    half = math.pi / 2.0
    return [
        CurvePath.segment(problem.source, [half, 0.0], [1.2, 0.5], SAMPLES),
        CurvePath.segment(problem.source, [half, 1.0], [2.0, 0.2], SAMPLES),
        CurvePath.segment(problem.source, [half, -1.0], [1.0, -1.8], SAMPLES),
    ]


def plane_curves(problem):
    return [
        CurvePath.segment(problem.source, [0.0, 0.0], [1.0, 2.0], SAMPLES),
        CurvePath.segment(problem.source, [0.5, 0.0], [-1.0, 1.0], SAMPLES),
    ]


class TestIsometryChecks(ScenarioTestCaseMixin, TestCase):
    def setUp(self):
        self.fast = self.config.with_steps(200)

    def test_compatible(self):
        for name in ("identity_sphere", "equator_rotation"):
            problem = get_problem(name)
            reports = run_checks(problem, curves=sphere_curves(problem), config=self.fast)
            self.assertEqual(
                [report.condition for report in reports],
                [Condition.CURVATURE, Condition.MAPS],
            )
            for report in reports:
                self.assertTrue(report.passed, report.to_dict())

    def test_radius_mismatch(self):
        problem = get_problem("radius_mismatch")
        report = check_isometry_curvature(
            problem, sphere_curves(problem), config=self.fast
        )
        self.assertFalse(report.passed)
        # |R| = 1 against 1 / 1.21 after the pullback
        self.assertAlmostEqual(report.max_residual, 1.0 - 1.0 / 1.21, delta=1e-5)
        self.assertEqual(report.curves_sampled, 3)
        self.assertTrue(check_bundle_maps(problem).passed)

    def test_failed_curves(self):
        problem = get_problem("identity_sphere")
        off = CurvePath.segment(problem.source, [1.0, 0.0], [1.2, 0.3], SAMPLES)
        report = check_isometry_curvature(
            problem, sphere_curves(problem)[:1], extra_curves=[off], config=self.fast
        )
        self.assertTrue(report.passed)
        self.assertEqual(report.curves_sampled, 1)
        self.assertEqual(len(report.failures), 1)
        self.assertEqual(report.failures[0].curve_id, 1)
        self.assertEqual(report.failures[0].error, "NotOnSubmanifold")
        with self.assertRaises(NoUsableCurve):
            check_isometry_curvature(problem, [off], config=self.fast)

    def test_not_applicable(self):
        with self.assertRaises(ConditionNotApplicable):
            check_isometry_curvature(get_problem("sphere_into_space"))


class TestImmersionChecks(ScenarioTestCaseMixin, TestCase):
    def setUp(self):
        self.fast = self.config.with_steps(200)

    def test_sphere_into_space(self):
        problem = get_problem("sphere_into_space")
        self.assertEqual(
            default_conditions(problem),
            [Condition.GAUSS, Condition.CODAZZI, Condition.RICCI, Condition.MAPS],
        )
        reports = run_checks(problem, curves=sphere_curves(problem), config=self.fast)
        for report in reports:
            self.assertTrue(report.passed, report.to_dict())
        ricci = reports[2]
        self.assertEqual(ricci.curves_sampled, 0)
        self.assertEqual(ricci.details, {"vacuous": 1.0})

    def test_gauss_violation(self):
        problem = get_problem("gauss_violation")
        report = check_gauss(problem, sphere_curves(problem), config=self.fast)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_residual, 1.0 - 0.81, delta=1e-5)
        self.assertEqual(len(report.worst_indices), 4)
        self.assertTrue(report.to_dict()["worst_location"]["curve_id"] in (0, 1, 2))

    def test_codazzi_bump(self):
        problem = get_problem("codazzi_bump")
        curves = [
            CurvePath.segment(
                problem.source, [math.pi / 2.0, 0.0], [math.pi / 2.0 + 0.2, 0.3], SAMPLES
            )
        ]
        report = check_codazzi(problem, curves, config=self.fast)
        self.assertFalse(report.passed)
        self.assertGreater(report.max_residual, 1e-2)

        flat = get_problem("codazzi_bump", amplitude=0.0)
        self.assertTrue(check_codazzi(flat, curves, config=self.fast).passed)

    def test_reparameterization(self):
        problem = get_problem("codazzi_bump")
        curve = CurvePath.segment(
            problem.source, [math.pi / 2.0, 0.0], [math.pi / 2.0 + 0.2, 0.3], SAMPLES
        )
        slower = curve.reparameterize(
            lambda t: 0.5 * (t + t * t), lambda t: 0.5 + t, lambda t: 1.0
        )
        for check in (check_gauss, check_codazzi):
            first = check(problem, [curve], config=self.fast)
            second = check(problem, [slower], config=self.fast)
            self.assertAlmostEqual(first.max_residual, second.max_residual, delta=1e-6)
            self.assertEqual(first.passed, second.passed)

    def test_ricci_plane(self):
        compatible = get_problem("ricci_plane")
        report = check_ricci(compatible, plane_curves(compatible), config=self.fast)
        self.assertTrue(report.passed, report.to_dict())
        self.assertEqual(report.curves_sampled, 2)

        twisted = get_problem("ricci_plane", k=0.5)
        report = check_ricci(twisted, plane_curves(twisted), config=self.fast)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_residual, 2.5, delta=1e-6)

    def test_scaled_maps(self):
        problem = get_problem("sphere_into_space")
        self.assertTrue(check_bundle_maps(problem).passed)
        report = check_bundle_maps(scaled_psi(problem, 1.01))
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.details["gramian"], 1.01 ** 2 - 1.0, delta=1e-9)

    def test_vacuous_codazzi(self):
        report = check_codazzi(get_problem("identity_sphere"))
        self.assertTrue(report.passed)
        self.assertEqual(report.curves_sampled, 0)


class TestSampling(ScenarioTestCaseMixin, TestCase):
    def test_sample_curves(self):
        problem = get_problem("identity_sphere")
        curves = sample_curves(problem, count=5, seed=3, samples=11)
        again = sample_curves(problem, count=5, seed=3, samples=11)
        self.assertEqual(len(curves), 5)
        for curve, other in zip(curves, again):
            self.assertArrayAlmostEqual(curve.points, other.points, 1e-12)
            _, distance = problem.source_sub.project(curve.start)
            self.assertLess(distance, 1e-9)
            self.assertTrue(all(problem.source.contains(point) for point in curve.points))

    def test_index_tuples(self):
        rng = self.rng()
        self.assertEqual(len(index_tuples((2, 2, 2, 2), 2, rng)), 16)
        self.assertEqual(index_tuples((0, 2), 2, rng), [])
        sampled = index_tuples((6, 6, 6, 6), 6, rng)
        self.assertEqual(len(sampled), 256)
        self.assertTrue(all(0 <= index < 6 for entry in sampled for index in entry))

    def test_parse_conditions(self):
        self.assertEqual(
            Condition.parse("gauss, codazzi,"), [Condition.GAUSS, Condition.CODAZZI]
        )
        with self.assertRaises(ValueError):
            Condition.parse("torsion")
