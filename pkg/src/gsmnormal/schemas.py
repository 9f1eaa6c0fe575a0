"""JSON schemas for CLI configs and result documents."""

from __future__ import annotations

_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_ORDER = {"type": "integer", "minimum": 1, "maximum": 5}
# non-finite values are emitted as strings
_REAL = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}


def _kind(name: str, props: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "properties": {"type": {"const": name}, **props},
        "required": ["type", *required],
        "additionalProperties": False,
    }


MIXING_1D = {
    "oneOf": [
        _kind("discrete", {"atoms": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "prefixItems": [_POS, _POS], "minItems": 2, "maxItems": 2},
        }}, ["atoms"]),
        _kind("uniform", {"a": _NONNEG, "b": _POS}, ["a", "b"]),
        _kind("exponential", {"mean": _POS}, ["mean"]),
        _kind("inverse_gamma", {"shape": _POS, "rate": _POS}, ["shape", "rate"]),
        _kind("kolmogorov_smirnov", {}, []),
    ]
}

MIXING_ND = {
    "oneOf": [
        _kind("discrete_matrix", {
            "n": _ORDER,
            "atoms": {
                "type": "array", "minItems": 1,
                "items": {
                    "type": "object",
                    "properties": {
                        "matrix": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                        "weight": _POS,
                    },
                    "required": ["matrix", "weight"],
                    "additionalProperties": False,
                },
            },
        }, ["n", "atoms"]),
        _kind("scalar_matrix", {"n": _ORDER, "nu": MIXING_1D}, ["n", "nu"]),
        _kind("inverse_wishart", {
            "n": _ORDER, "p": _POS, "sample_count": {"type": "integer", "minimum": 2},
        }, ["n", "p"]),
    ]
}

CONFIG = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "mixing": {"oneOf": MIXING_1D["oneOf"] + MIXING_ND["oneOf"]},
        "tol": _POS,
        "max_iter": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "t": {"oneOf": [_POS, {"type": "array", "items": {"type": "number"}, "minItems": 1}]},
        "grid": {
            "type": "object",
            "properties": {"min": {"type": "number"}, "max": {"type": "number"},
                           "points": {"type": "integer", "minimum": 1}},
            "required": ["min", "max", "points"],
            "additionalProperties": False,
        },
        "claims": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "properties": {"name": {"type": "string"}}, "required": ["name"]},
        },
    },
    "additionalProperties": False,
}

SOLVE_RESULT = {
    "type": "object",
    "properties": {
        "t0": _POS, "y0": _POS,
        "distance_corrected": _NONNEG, "distance_paper_convention": _NONNEG,
        "mean_V": _REAL, "residual": _NONNEG, "bracket_iterations": {"type": "integer", "minimum": 0},
    },
    "required": ["t0", "y0", "distance_corrected", "distance_paper_convention",
                 "mean_V", "residual", "bracket_iterations"],
    "additionalProperties": False,
}

SOLVE_ND_RESULT = {
    "type": "object",
    "properties": {
        "n": _ORDER,
        "t0": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "residual": _NONNEG,
        "iterations": {"type": "integer", "minimum": 0},
        "minimality_certified": {"type": "boolean"},
        "distance_corrected": _NONNEG,
    },
    "required": ["n", "t0", "residual", "iterations", "minimality_certified", "distance_corrected"],
    "additionalProperties": False,
}

DISTANCE_RESULT = {
    "type": "object",
    "properties": {
        "t": {"oneOf": [_POS, {"type": "array", "items": {"type": "number"}}]},
        "distance_corrected": _NONNEG,
        "distance_paper_convention": _NONNEG,
    },
    "required": ["t", "distance_corrected"],
    "additionalProperties": False,
}

REPORT = {
    "type": "object",
    "properties": {
        "claim": {"type": "string"}, "description": {"type": "string"},
        "max_abs_error": _REAL, "tolerance": _NONNEG, "passed": {"type": "boolean"},
    },
    "required": ["claim", "description", "max_abs_error", "tolerance", "passed"],
    "additionalProperties": False,
}

VERIFY_RESULT = {
    "type": "object",
    "properties": {"reports": {"type": "array", "items": REPORT}, "passed": {"type": "boolean"}},
    "required": ["reports", "passed"],
    "additionalProperties": False,
}

EXAMPLES_RESULT = {
    "type": "object",
    "properties": {
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "row": {"type": "string"}, "quantity": {"type": "string"},
                    "value": _REAL, "expected": _REAL, "tolerance": _NONNEG,
                    "passed": {"type": "boolean"}, "distance_corrected": _NONNEG,
                },
                "required": ["row", "quantity", "value", "expected", "tolerance", "passed"],
                "additionalProperties": False,
            },
        },
        "note": {"type": "string"},
        "passed": {"type": "boolean"},
    },
    "required": ["rows", "note", "passed"],
    "additionalProperties": False,
}
