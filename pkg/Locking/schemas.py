"""
JSON Schemas Module
Schemas for block files, truth-set files, key files and experiment configs.
"""

from jsonschema import Draft7Validator

from errors import ConfigError, DomainError

CUBE_SCHEMA = {
    "type": "array",
    "items": {
        "type": "array",
        "items": [{"type": "integer", "minimum": 0}, {"type": "boolean"}],
        "minItems": 2,
        "maxItems": 2,
    },
}

TRUTH_SET_SCHEMA = {
    "type": "object",
    "required": ["n", "true_set"],
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 24},
        "true_set": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "cover": {
            "type": "object",
            "required": ["cubes", "inverted"],
            "properties": {
                "cubes": {"type": "array", "items": CUBE_SCHEMA},
                "inverted": {"type": "boolean"},
            },
        },
    },
}

BLOCK_SCHEMA = {
    "type": "object",
    "required": ["n", "type", "f", "g"],
    "properties": {
        "n": {"type": "integer", "minimum": 1, "maximum": 24},
        "type": {"type": "integer", "enum": [0, 1]},
        "f": TRUTH_SET_SCHEMA,
        "g": TRUTH_SET_SCHEMA,
    },
}

KEY_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "K_f": {"type": "integer", "minimum": 0},
        "K_g": {"type": "integer", "minimum": 0},
        "assignment": {
            "type": "object",
            "additionalProperties": {"type": "integer", "enum": [0, 1]},
        },
    },
    "anyOf": [{"required": ["n", "K_f", "K_g"]}, {"required": ["assignment"]}],
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "command": {"type": ["string", "null"], "enum": ["gen", "attack", "analyze", None]},
        "kind": {"type": "string", "enum": ["antisat", "comp", "noncomp", "consecutive"]},
        "n": {"type": "integer", "minimum": 2, "maximum": 24},
        "t": {"type": ["integer", "null"], "minimum": 1},
        "block_type": {"type": "integer", "enum": [0, 1]},
        "f_column": {"type": ["integer", "null"], "minimum": 0},
        "common_row": {"type": ["integer", "null"], "minimum": 0},
        "q": {"type": ["integer", "null"], "minimum": 0},
        "included_columns": {
            "type": ["array", "null"],
            "items": {"type": "integer", "minimum": 0},
        },
        "dividing_column": {"type": ["integer", "null"], "minimum": 0},
        "cell_row": {"type": ["integer", "null"], "minimum": 0},
        "single_cell_in": {"type": "string", "enum": ["g", "f"]},
        "p": {"type": ["integer", "null"], "minimum": 1},
        "host": {"type": ["string", "null"]},
        "target_output": {"type": ["string", "null"]},
        "block_file": {"type": ["string", "null"]},
        "locked_file": {"type": ["string", "null"]},
        "key_file": {"type": ["string", "null"]},
        "oracle_bench": {"type": ["string", "null"]},
        "seed": {"type": ["integer", "null"], "minimum": 0},
        "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "conflict_cap": {"type": ["integer", "null"], "minimum": 1},
        "iteration_cap": {"type": ["integer", "null"], "minimum": 1},
        "budget": {"type": ["integer", "null"], "minimum": 0},
        "profile_step": {"type": ["integer", "null"], "minimum": 1},
        "max_iters": {"type": ["integer", "null"], "minimum": 1},
        "solver": {"type": "string", "enum": ["embedded", "external"]},
        "solver_cmd": {"type": ["string", "null"]},
        "threads": {"type": "integer", "minimum": 1},
        "export_cnf": {"type": "boolean"},
        "census": {"type": "boolean"},
        "census_mode": {"type": "string", "enum": ["exhaustive", "sampled"]},
        "sample_count": {"type": "integer", "minimum": 1},
        "sps": {"type": "boolean"},
        "sps_exact": {"type": "boolean"},
        "cas_probe": {"type": "boolean"},
        "bypass_key": {"type": ["string", "null"]},
        "distinct": {"type": "boolean"},
        "constraints": {"type": "boolean"},
        "wk_array": {"type": "boolean"},
        "removal": {"type": "boolean"},
        "output_dir": {"type": "string"},
        "output_format": {"type": "string", "enum": ["json", "csv"]},
    },
}


def _first_error(schema: dict, document) -> str:
    errors = sorted(Draft7Validator(schema).iter_errors(document), key=lambda e: list(e.path))
    if not errors:
        return ""
    error = errors[0]
    location = "/".join(str(part) for part in error.path) or "<root>"
    return f"{location}: {error.message}"


def validate_document(schema: dict, document, what: str) -> None:
    """
    Validate a loaded JSON document.

    Raises:
        DomainError: naming the first offending field
    """
    message = _first_error(schema, document)
    if message:
        raise DomainError(f"Invalid {what}: {message}")


def validate_config_document(document: dict) -> None:
    """Validate a merged experiment configuration, raising ConfigError."""
    message = _first_error(CONFIG_SCHEMA, document)
    if message:
        raise ConfigError(f"Invalid configuration: {message}")
