import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import jsonschema
import numpy as np
from jsonschema.exceptions import best_match

from ..compat import Condition
from ..constants import DEFAULT_CURVE_SAMPLES
from ..geometry import GeometryException, MetricField
from ..integrate import IntegratorConfig, InvalidIntegratorConfig
from ..reconstruct import CahProblem, ReconstructionException
from ..scenarios import ScenarioException, default_catalog
from ..transport import CurvePath, TransportException
from ..variation import Homotopy
from .exceptions import ConfigValidationError, MissingConfigSection
from .schema import RUN_CONFIG_SCHEMA

logger = logging.getLogger(__name__)

_validator = jsonschema.Draft7Validator(RUN_CONFIG_SCHEMA)


def validate_config(data: Any) -> None:
    """
    :raises ConfigValidationError: most relevant schema violation
    """
    error = best_match(_validator.iter_errors(data))
    if error is not None:
        path = "/".join(str(part) for part in error.absolute_path)
        raise ConfigValidationError(f"Invalid config at '{path}': {error.message}", path)


@dataclass(frozen=True)
class RunConfig:
    """
    Validated run configuration. Command-specific sections stay in ``data``.
    """

    command: str
    data: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    tolerance: Optional[float] = None
    output_directory: Optional[Path] = None
    output_format: str = "csv"
    conditions: Optional[List[Condition]] = None

    @classmethod
    def from_dict(cls, command: str, data: Dict[str, Any]) -> "RunConfig":
        validate_config(data)
        if data.get("command", command) != command:
            raise ConfigValidationError(
                f"Config is for '{data['command']}', not '{command}'", "command"
            )
        output = data.get("output", {})
        conditions = None
        if "conditions" in data:
            conditions = [Condition(value) for value in data["conditions"]]
        return cls(
            command=command,
            data=data,
            seed=data.get("seed", 0),
            threads=data.get("threads", 1),
            tolerance=data.get("tolerance"),
            output_directory=Path(output["directory"]) if "directory" in output else None,
            output_format=output.get("format", "csv"),
            conditions=conditions,
        )

    @classmethod
    def load(cls, command: str, path: Optional[str]) -> "RunConfig":
        if path is None:
            return cls.from_dict(command, {})
        try:
            with open(path) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigValidationError(f"Cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigValidationError(f"Config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(command, data)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        return replace(
            self, **{key: value for key, value in overrides.items() if value is not None}
        )

    def section(self, key: str) -> Any:
        try:
            return self.data[key]
        except KeyError as exc:
            raise MissingConfigSection(
                f"Command '{self.command}' needs '{key}' in the config", key
            ) from exc

    def array(self, key: str, default: Any = None) -> Optional[np.ndarray]:
        if key not in self.data:
            return None if default is None else np.asarray(default, dtype=float)
        return np.asarray(self.data[key], dtype=float)

    @property
    def samples(self) -> int:
        return self.data.get("samples", DEFAULT_CURVE_SAMPLES)

    def integrator(self) -> IntegratorConfig:
        try:
            return IntegratorConfig.from_dict(self.data.get("integrator", {}))
        except InvalidIntegratorConfig as exc:
            raise ConfigValidationError(str(exc), "integrator") from exc

    def problem(self) -> CahProblem:
        spec = self.section("problem")
        table = spec.get("maps", {}).get("table")
        try:
            return default_catalog.problem(spec["scenario"], table, **spec.get("params", {}))
        except (ScenarioException, ReconstructionException, GeometryException) as exc:
            raise ConfigValidationError(str(exc), "problem") from exc

    def manifold(self) -> MetricField:
        if "manifold" not in self.data and "problem" in self.data:
            return self.problem().source
        spec = self.section("manifold")
        try:
            return default_catalog.manifold(spec["name"], **spec.get("params", {}))
        except ScenarioException as exc:
            raise ConfigValidationError(str(exc), "manifold") from exc

    def curve(self, metric: MetricField) -> CurvePath:
        """
        ``segment`` from ``start`` to ``end``, ``latitude`` circle of a sphere chart
        run ``turns`` times from ``phi0``, or explicit ``samples``
        """
        spec = self.section("curve")
        samples = spec.get("samples", self.samples)
        kind = spec["kind"]
        try:
            if kind == "segment":
                return CurvePath.segment(
                    metric, np.asarray(spec["start"]), np.asarray(spec["end"]), samples
                )
            if kind == "latitude":
                theta = float(spec["theta"])
                phi0 = float(spec.get("phi0", 0.0))
                sweep = 2.0 * math.pi * float(spec.get("turns", 1.0))
                return CurvePath.from_function(
                    metric,
                    lambda t: np.array([theta, phi0 + sweep * t]),
                    velocity=lambda t: np.array([0.0, sweep]),
                    acceleration=lambda t: np.zeros(2),
                    samples=samples,
                )
            return CurvePath.from_samples(
                metric, np.asarray(spec["t"]), np.asarray(spec["points"])
            )
        except KeyError as exc:
            raise ConfigValidationError(
                f"Curve of kind '{kind}' needs '{exc.args[0]}'", "curve"
            ) from exc
        except (GeometryException, TransportException) as exc:
            raise ConfigValidationError(f"Invalid curve: {exc}", "curve") from exc

    def homotopy(self, problem: CahProblem) -> Homotopy:
        """
        Cone of chart segments from ``x(base(u))`` to ``endpoint``, the base moving
        linearly from ``base_start`` to ``base_end`` in S parameters
        """
        spec = self.section("homotopy")
        start = np.asarray(spec["base_start"], dtype=float)
        end = np.asarray(spec["base_end"], dtype=float)
        try:
            return Homotopy.cone(
                problem.source,
                problem.source_sub,
                lambda u: start + u * (end - start),
                np.asarray(spec["endpoint"], dtype=float),
                base_derivative=lambda u: end - start,
            )
        except (GeometryException, ValueError) as exc:
            raise ConfigValidationError(f"Invalid homotopy: {exc}", "homotopy") from exc

