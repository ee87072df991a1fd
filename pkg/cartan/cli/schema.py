"""
JSON schemas of the run configuration. Unknown keys are rejected everywhere.
"""
from typing import Any, Dict

COMMANDS = (
    "transport",
    "develop",
    "gdevelop",
    "anti-develop",
    "variation",
    "reconstruct",
    "check",
    "check-well-defined",
    "demo",
)

CONDITIONS = ("curvature", "gauss", "codazzi", "ricci", "maps")

NUMBER = {"type": "number"}
VECTOR = {"type": "array", "items": NUMBER, "minItems": 1}
MATRIX = {"type": "array", "items": VECTOR, "minItems": 1}
TENSOR3 = {"type": "array", "items": MATRIX, "minItems": 1}


def sampled(values: Dict[str, Any]) -> Dict[str, Any]:
    """
    Profile tabulated on a grid of [0, 1]: ``{"t": [...], "values": [...]}``
    """
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["t", "values"],
        "properties": {
            "t": {"type": "array", "items": NUMBER, "minItems": 2},
            "values": {"type": "array", "items": values, "minItems": 2},
        },
    }


VELOCITY_SPEC = {"oneOf": [VECTOR, sampled(VECTOR)]}
H_SPEC = {"oneOf": [TENSOR3, sampled(TENSOR3)]}

PARAMS = {
    "type": "object",
    "additionalProperties": {"type": ["number", "string", "integer"]},
}

INTEGRATOR_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "method": {"enum": ["rk4", "rk45"]},
        "steps": {"type": "integer", "minimum": 1},
        "rel_tol": {"type": "number", "exclusiveMinimum": 0},
        "abs_tol": {"type": "number", "exclusiveMinimum": 0},
        "reortho": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "policy": {"enum": ["never", "every", "drift"]},
                "tau": {"type": "number", "exclusiveMinimum": 0},
                "every": {"type": "integer", "minimum": 1},
            },
        },
    },
}

TABLE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["u", "phi", "psi_normal"],
    "properties": {
        "u": VECTOR,
        "phi": VECTOR,
        "psi_normal": TENSOR3,
        "psi_fiber": TENSOR3,
    },
}

PROBLEM_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario"],
    "properties": {
        "scenario": {"type": "string"},
        "params": PARAMS,
        "maps": {
            "type": "object",
            "additionalProperties": False,
            "required": ["table"],
            "properties": {"table": TABLE_SCHEMA},
        },
    },
}

MANIFOLD_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "properties": {"name": {"type": "string"}, "params": PARAMS},
}

CURVE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["segment", "latitude", "samples"]},
        "start": VECTOR,
        "end": VECTOR,
        "theta": NUMBER,
        "phi0": NUMBER,
        "turns": NUMBER,
        "t": VECTOR,
        "points": MATRIX,
        "samples": {"type": "integer", "minimum": 2},
    },
}

HOMOTOPY_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["base_start", "base_end", "endpoint"],
    "properties": {
        "kind": {"enum": ["cone"]},
        "base_start": VECTOR,
        "base_end": VECTOR,
        "endpoint": VECTOR,
    },
}

RUN_CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "problem": PROBLEM_SCHEMA,
        "integrator": INTEGRATOR_SCHEMA,
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"type": "string"},
                "format": {"enum": ["csv", "json"]},
            },
        },
        "manifold": MANIFOLD_SCHEMA,
        "curve": CURVE_SCHEMA,
        "point": VECTOR,
        "frame": MATRIX,
        "velocity": VELOCITY_SPEC,
        "vectors": MATRIX,
        "split": {
            "type": "object",
            "additionalProperties": False,
            "required": ["tangent", "normal"],
            "properties": {
                "tangent": {"type": "integer", "minimum": 1},
                "normal": {"type": "integer", "minimum": 0},
            },
        },
        "h": H_SPEC,
        "homotopy": HOMOTOPY_SCHEMA,
        "u_values": VECTOR,
        "points": MATRIX,
        "strategy": {"enum": ["straight-line", "user-curve"]},
        "samples": {"type": "integer", "minimum": 2},
        "conditions": {
            "type": "array",
            "items": {"enum": list(CONDITIONS)},
            "uniqueItems": True,
        },
        "count": {"type": "integer", "minimum": 1},
        "delta": {"type": "number", "exclusiveMinimum": 0},
    },
}
