"""JSON schemas for state files and for the CLI's ``--json`` reports."""

_complex = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_vector = {"type": "array", "items": _complex}
_matrix = {"type": "array", "items": _vector}
_real_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_indices = {"type": "array", "items": {"type": "integer", "minimum": 0}}

STATE_FILE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "dim", "data"],
    "properties": {
        "schema": {"enum": ["density", "pure", "ensemble", "kraus"]},
        "dim": {"type": "integer", "minimum": 1},
        "label": {"type": "string"},
        "data": {},
    },
    "allOf": [
        {"if": {"properties": {"schema": {"const": "density"}}}, "then": {"properties": {"data": _matrix}}},
        {"if": {"properties": {"schema": {"const": "pure"}}}, "then": {"properties": {"data": _vector}}},
        {
            "if": {"properties": {"schema": {"const": "ensemble"}}},
            "then": {
                "properties": {
                    "data": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["p", "amplitudes"],
                            "properties": {"p": {"type": "number"}, "amplitudes": _vector},
                        },
                    }
                }
            },
        },
        {
            "if": {"properties": {"schema": {"const": "kraus"}}},
            "then": {"properties": {"data": {"type": "array", "minItems": 1, "items": _matrix}}},
        },
    ],
}

_violation = {
    "type": "object",
    "required": ["kind", "magnitude", "bound"],
    "properties": {"kind": {"type": "string"}, "magnitude": {"type": "number"}, "bound": {"type": "number"}},
}

_staircase = {
    "type": "object",
    "required": ["breakpoints", "ratios", "segment_masses", "f_max", "intermediate"],
    "properties": {
        "breakpoints": {"type": "array", "items": {"type": "integer"}},
        "ratios": {"type": "array", "items": {"type": "number"}},
        "segment_masses": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        "f_max": {"type": "number"},
        "intermediate": _vector,
        "canonical_intermediate": {"type": "array", "items": {"type": "number"}},
        "target_order": _indices,
    },
}

_block = {
    "type": "object",
    "required": ["indices", "probability", "state"],
    "properties": {"indices": _indices, "probability": {"type": "number"}, "state": _vector},
}

REPORT_SCHEMAS = {
    "validate": {
        "type": "object",
        "required": ["command", "schema", "valid", "violations"],
        "properties": {
            "command": {"const": "validate"},
            "schema": {"type": "string"},
            "valid": {"type": "boolean"},
            "violations": {"type": "array", "items": _violation},
            "kraus": {"type": "object"},
        },
    },
    "subspaces": {
        "type": "object",
        "required": ["command", "comparison_matrix", "support", "blocks", "null_indices", "split"],
        "properties": {
            "command": {"const": "subspaces"},
            "comparison_matrix": _real_matrix,
            "support": _indices,
            "blocks": {"type": "array", "items": _block},
            "null_indices": _indices,
            "split": {"type": "boolean"},
        },
    },
    "distill": {
        "type": "object",
        "required": ["command", "f_max", "limiting_block", "blocks"],
        "properties": {
            "command": {"const": "distill"},
            "f_max": {"type": "number"},
            "limiting_block": {"type": "integer"},
            "blocks": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["indices", "probability", "staircase"],
                    "properties": {
                        "indices": _indices,
                        "probability": {"type": "number"},
                        "staircase": _staircase,
                        "oracle_fmax": {"type": ["number", "null"]},
                        "oracle_agrees": {"type": ["boolean", "null"]},
                    },
                },
            },
            "f0": {"type": "number"},
            "can_reach": {"type": "boolean"},
            "p_max": {"type": "number"},
            "succeeding_blocks": _indices,
        },
    },
    "apply": {
        "type": "object",
        "required": ["command", "classifications", "complete", "output"],
        "properties": {
            "command": {"const": "apply"},
            "classifications": {"type": "array", "items": {"type": "string"}},
            "classification": {"type": "string"},
            "complete": {"type": "boolean"},
            "completeness_error": {"type": "number"},
            "stochastic": {"type": "boolean"},
            "probability": {"type": "number"},
            "output": _matrix,
            "target_fidelity": {"type": "number"},
        },
    },
    "fidelity": {
        "type": "object",
        "required": ["command", "kinds", "root_fidelity", "squared_fidelity"],
        "properties": {
            "command": {"const": "fidelity"},
            "kinds": {"type": "array", "items": {"enum": ["pure", "density"]}},
            "root_fidelity": {"type": "number"},
            "squared_fidelity": {"type": "number"},
        },
    },
    "error": {
        "type": "object",
        "required": ["command", "error", "message"],
        "properties": {"command": {"type": "string"}, "error": {"type": "string"}, "message": {"type": "string"}},
    },
}
