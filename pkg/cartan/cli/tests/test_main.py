import json
import math
import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np

from ..config import RunConfig, validate_config
from ..exceptions import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID_CONFIG,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    ConfigValidationError,
    MissingConfigSection,
)
from ..main import main
from ..output import Table

FAST = {"steps": 200}

PLANE_DEVELOP = {
    "manifold": {"name": "euclidean", "params": {"n": 2}},
    "point": [0.0, 0.0],
    "velocity": [1.0, 2.0],
    "samples": 11,
    "integrator": {"steps": 100},
}


class CliTestCase(TestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.root = Path(directory.name)

    def run_cli(self, command, data, *flags, out="out"):
        config_path = self.root / f"{out}-config.json"
        config_path.write_text(json.dumps(data))
        out_dir = self.root / out
        code = main([command, "--config", str(config_path), "--out", str(out_dir), *flags])
        return code, out_dir

    def report(self, out_dir: Path):
        return json.loads((out_dir / "report.json").read_text())


class TestCommands(CliTestCase):
    def test_develop(self):
        code, out_dir = self.run_cli("develop", PLANE_DEVELOP)
        self.assertEqual(code, EXIT_OK)
        report = self.report(out_dir)
        self.assertAlmostEqual(report["endpoint"][0], 1.0, places=12)
        self.assertAlmostEqual(report["endpoint"][1], 2.0, places=12)
        lines = (out_dir / "develop.csv").read_text().splitlines()
        self.assertEqual(lines[0], "t,x1,x2,E1_1,E1_2,E2_1,E2_2")
        self.assertEqual(len(lines), 12)

    def test_csv_determinism(self):
        _, first = self.run_cli("develop", PLANE_DEVELOP, out="first")
        _, second = self.run_cli("develop", PLANE_DEVELOP, out="second")
        self.assertEqual(
            (first / "develop.csv").read_text(), (second / "develop.csv").read_text()
        )

    def test_json_tables(self):
        code, out_dir = self.run_cli("develop", PLANE_DEVELOP, "--format", "json")
        self.assertEqual(code, EXIT_OK)
        table = json.loads((out_dir / "develop.json").read_text())
        self.assertEqual(table["header"][:3], ["t", "x1", "x2"])
        self.assertEqual(len(table["rows"]), 11)
        self.assertIn("endpoint", self.report(out_dir))

    def test_transport_holonomy(self):
        data = {
            "manifold": {"name": "sphere_chart"},
            "curve": {"kind": "latitude", "theta": math.pi / 3.0, "samples": 101},
            "vectors": [[1.0, 0.0]],
        }
        code, out_dir = self.run_cli("transport", data)
        self.assertEqual(code, EXIT_OK)
        report = self.report(out_dir)
        self.assertAlmostEqual(report["rotation_angle"], math.pi, delta=1e-6)
        self.assertLess(report["norm_change"], 1e-9)

    def test_reconstruct(self):
        data = {
            "problem": {"scenario": "equator_rotation"},
            "points": [[1.0, 0.3], [2.0, -0.5]],
            "samples": 101,
            "integrator": FAST,
        }
        code, out_dir = self.run_cli("reconstruct", data, "--threads", "2")
        self.assertEqual(code, EXIT_OK)
        points = self.report(out_dir)["points"]
        self.assertEqual(len(points), 2)
        self.assertAlmostEqual(points[0]["f_point"][1], 0.3 + math.pi / 6.0, places=7)
        header = (out_dir / "reconstruct.csv").read_text().splitlines()[0]
        self.assertEqual(header, "x1,x2,f1,f2,isometry_defect")

    def test_check(self):
        data = {"problem": {"scenario": "gauss_violation"}, "count": 2, "integrator": FAST}
        code, out_dir = self.run_cli("check", data, "--conditions", "gauss")
        self.assertEqual(code, EXIT_CHECK_FAILED)
        report = self.report(out_dir)
        self.assertFalse(report["passed"])
        self.assertEqual(report["reports"][0]["condition"], "gauss")

        data["problem"] = {"scenario": "identity_sphere"}
        code, out_dir = self.run_cli("check", data, out="identity")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(self.report(out_dir)["passed"])

    def test_variation(self):
        data = {
            "problem": {"scenario": "identity_sphere"},
            "homotopy": {"base_start": [-0.3], "base_end": [0.3], "endpoint": [1.2, 0.4]},
            "u_values": [0.5],
            "samples": 21,
            "integrator": FAST,
        }
        code, out_dir = self.run_cli("variation", data)
        self.assertEqual(code, EXIT_OK)
        entry = self.report(out_dir)["slices"][0]
        self.assertLess(entry["fd_max_difference"], 1e-4)
        header = (out_dir / "variation.csv").read_text().splitlines()[0]
        self.assertTrue(header.startswith("u,t,U_1,U_2"))

    def test_demo(self):
        code, out_dir = self.run_cli(
            "demo", {"count": 2, "samples": 101, "integrator": FAST}, "--seed", "4"
        )
        self.assertEqual(code, EXIT_OK)
        report = self.report(out_dir)
        self.assertTrue(report["passed"])
        self.assertLess(report["max_embedding_error"], 1e-5)


class TestProfiles(CliTestCase):
    SPACE_GDEVELOP = {
        "manifold": {"name": "euclidean", "params": {"n": 3}},
        "point": [0.0, 0.0, 0.0],
        "velocity": [math.pi, 0.0],
        "split": {"tangent": 2, "normal": 1},
        "samples": 11,
        "integrator": {"steps": 400},
    }
    UNIT_H = [[[1.0], [0.0]], [[0.0], [1.0]]]

    def test_develop_tabulated_velocity(self):
        # v(t) = 2t (1, 1) integrates to (1, 1) in the plane
        velocity = {"t": [0.0, 0.5, 1.0], "values": [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]}
        data = {**PLANE_DEVELOP, "velocity": velocity}
        code, out_dir = self.run_cli("develop", data)
        self.assertEqual(code, EXIT_OK)
        endpoint = self.report(out_dir)["endpoint"]
        self.assertAlmostEqual(endpoint[0], 1.0, places=10)
        self.assertAlmostEqual(endpoint[1], 1.0, places=10)

        rows = np.loadtxt(out_dir / "develop.csv", delimiter=",", skiprows=1)
        self.assertLess(float(np.max(np.abs(rows[:, 1] - rows[:, 0] ** 2))), 1e-10)

    def test_gdevelop_constant_and_tabulated_h(self):
        code, out_dir = self.run_cli("gdevelop", {**self.SPACE_GDEVELOP, "h": self.UNIT_H})
        self.assertEqual(code, EXIT_OK)
        constant = self.report(out_dir)["endpoint"]
        for value, expected in zip(constant, [0.0, 0.0, 2.0]):
            self.assertAlmostEqual(value, expected, places=6)

        tabulated = {"t": [0.0, 0.5, 1.0], "values": [self.UNIT_H] * 3}
        code, out_dir = self.run_cli(
            "gdevelop",
            {
                **self.SPACE_GDEVELOP,
                "h": tabulated,
                "velocity": {"t": [0.0, 0.5, 1.0], "values": [[math.pi, 0.0]] * 3},
            },
            out="tabulated",
        )
        self.assertEqual(code, EXIT_OK)
        for value, expected in zip(self.report(out_dir)["endpoint"], constant):
            self.assertAlmostEqual(value, expected, places=9)

    def test_invalid_profiles(self):
        shifted = {"t": [0.2, 1.0], "values": [[1.0, 0.0], [1.0, 0.0]]}
        code, _ = self.run_cli("develop", {**PLANE_DEVELOP, "velocity": shifted})
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        short = {"t": [0.0, 0.5, 1.0], "values": [[1.0, 0.0], [1.0, 0.0]]}
        code, _ = self.run_cli("develop", {**PLANE_DEVELOP, "velocity": short}, out="short")
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        code, _ = self.run_cli(
            "develop", {**PLANE_DEVELOP, "velocity": {"values": [[1.0, 0.0]]}}, out="no-grid"
        )
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        code, _ = self.run_cli(
            "gdevelop", {**self.SPACE_GDEVELOP, "h": [[[1.0]]]}, out="bad-h"
        )
        self.assertEqual(code, EXIT_INVALID_CONFIG)


class TestExitCodes(CliTestCase):
    def test_invalid_config(self):
        code, _ = self.run_cli("develop", {**PLANE_DEVELOP, "colour": "red"})
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        without_velocity = {k: v for k, v in PLANE_DEVELOP.items() if k != "velocity"}
        code, _ = self.run_cli("develop", without_velocity)
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        code, _ = self.run_cli("reconstruct", {"problem": {"scenario": "torus"}})
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        code, _ = self.run_cli("develop", PLANE_DEVELOP, "--threads", "0")
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        code, _ = self.run_cli(
            "check", {"problem": {"scenario": "identity_sphere"}}, "--conditions", "torsion"
        )
        self.assertEqual(code, EXIT_INVALID_CONFIG)
        self.assertEqual(main(["integrate"]), EXIT_INVALID_CONFIG)
        missing = str(self.root / "missing.json")
        self.assertEqual(main(["develop", "--config", missing]), EXIT_INVALID_CONFIG)

    def test_condition_not_applicable(self):
        data = {"problem": {"scenario": "sphere_into_space"}, "count": 1}
        code, _ = self.run_cli("check", data, "--conditions", "curvature")
        self.assertEqual(code, EXIT_INVALID_CONFIG)

    def test_numerical_failure(self):
        data = {
            "manifold": {"name": "hyperbolic_half_plane"},
            "point": [0.0, 1.0],
            "velocity": [0.0, -5.0],
            "samples": 11,
        }
        code, out_dir = self.run_cli("develop", data)
        self.assertEqual(code, EXIT_NUMERICAL_FAILURE)
        self.assertFalse((out_dir / "report.json").exists())


class TestRunConfig(TestCase):
    def test_validation(self):
        validate_config({"seed": 3, "integrator": {"method": "rk45"}})
        with self.assertRaises(ConfigValidationError) as context:
            validate_config({"seed": -1})
        self.assertEqual(context.exception.path, "seed")
        with self.assertRaises(ConfigValidationError):
            validate_config({"integrator": {"reortho": {"policy": "sometimes"}}})

    def test_from_dict(self):
        config = RunConfig.from_dict(
            "check",
            {
                "seed": 7,
                "threads": 2,
                "conditions": ["gauss", "ricci"],
                "output": {"format": "json"},
            },
        )
        self.assertEqual((config.seed, config.threads, config.output_format), (7, 2, "json"))
        self.assertEqual([c.value for c in config.conditions], ["gauss", "ricci"])
        self.assertEqual(config.with_overrides(seed=None, threads=4).threads, 4)
        self.assertEqual(config.with_overrides(seed=None).seed, 7)
        with self.assertRaises(MissingConfigSection):
            config.section("problem")
        with self.assertRaises(ConfigValidationError):
            RunConfig.from_dict("check", {"command": "demo"})

    def test_table_csv(self):
        table = Table(["a", "b"], np.array([[0.1, 1.0 / 3.0]]))
        self.assertEqual(table.to_csv(), "a,b\n0.10000000000000001,0.33333333333333331\n")
