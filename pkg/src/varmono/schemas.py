"""JSON Schemas (draft 2020-12) for the ``--format json`` output of each command."""

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}

SAMPLE = {
    "type": "object",
    "required": ["n", "alpha_min", "x_min", "x_max"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "alpha_min": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "x_min": _NUM,
        "x_max": _NUM,
    },
}

BOUNDS = {
    "type": "object",
    "required": ["thm4", "cartwright_field", "a2_lower"],
    "additionalProperties": False,
    "properties": {
        "thm4": {
            "type": "object",
            "required": ["lower", "upper", "r", "s"],
            "additionalProperties": False,
            "properties": {"lower": _NUM, "upper": _NUM, "r": _NUM, "s": _NUM},
        },
        "cartwright_field": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["lower", "upper"],
                    "additionalProperties": False,
                    "properties": {"lower": _NUM, "upper": _NUM},
                },
            ]
        },
        "a2_lower": _NUM,
    },
}

DECOMPOSITION = {
    "type": "object",
    "required": [
        "var_x", "var_pos", "var_neg", "var_cond_pos", "var_cond_neg",
        "eq_first", "eq_middle", "eq_third", "algebra",
    ],
    "additionalProperties": False,
    "properties": {
        "var_x": _NUM,
        "var_pos": _NUM,
        "var_neg": _NUM,
        "var_cond_pos": _NUM,
        "var_cond_neg": _NUM,
        "eq_first": {"type": "boolean"},
        "eq_middle": {"type": "boolean"},
        "eq_third": {"type": "boolean"},
        "algebra": {"enum": ["B", "B1", "B2"]},
    },
}

CURVE = {
    "type": "object",
    "required": ["grid", "log_v", "monotone"],
    "additionalProperties": False,
    "properties": {
        "grid": {"type": "array", "items": _NUM, "minItems": 1},
        # null encodes log V = -inf (zero variance)
        "log_v": {"type": "array", "items": _NUM_OR_NULL, "minItems": 1},
        "monotone": {"type": "boolean"},
    },
}

REPORT_OUTPUT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "varmono report",
    "type": "object",
    "required": ["gap", "bounds", "sample"],
    "additionalProperties": False,
    "properties": {"gap": _NUM, "bounds": BOUNDS, "sample": SAMPLE},
}

CURVE_OUTPUT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "varmono curve",
    "type": "object",
    "required": ["curve", "sample"],
    "additionalProperties": False,
    "properties": {"curve": CURVE, "sample": SAMPLE},
}

DECOMPOSE_OUTPUT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "varmono decompose",
    "type": "object",
    "required": ["decomposition", "sample"],
    "additionalProperties": False,
    "properties": {"decomposition": DECOMPOSITION, "sample": SAMPLE},
}

_WEIGHTED_SAMPLE = {
    "type": "object",
    "required": ["values", "weights"],
    "properties": {
        "values": {"type": "array", "items": _NUM, "minItems": 1},
        "weights": {"type": "array", "items": _NUM, "minItems": 1},
    },
}

STRESS_OUTPUT = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "varmono stress",
    "type": "object",
    "required": ["summary", "findings"],
    "additionalProperties": False,
    "properties": {
        "summary": {
            "type": "object",
            "required": ["seed", "trials", "targets", "violations", "inequalities"],
            "properties": {
                "seed": {"type": "integer"},
                "trials": {"type": "integer", "minimum": 1},
                "targets": {"type": "array", "items": {"type": "string"}},
                "violations": {"type": "integer", "minimum": 0},
                "inequalities": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object",
                        "required": ["checks", "violations", "near_equalities"],
                        "properties": {
                            "checks": {"type": "integer"},
                            "violations": {"type": "integer"},
                            "near_equalities": {"type": "integer"},
                            "min_rel_slack": _NUM_OR_NULL,
                            "min_slack": _NUM_OR_NULL,
                            "witness_trial": {"type": "integer"},
                            "witness_parameters": {"type": "object"},
                            "witness_sample": _WEIGHTED_SAMPLE,
                        },
                    },
                },
            },
        },
        "findings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "inequality_id", "trial_index", "parameters", "slack", "rel_slack", "sample"],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": ["violation", "near_equality", "local_minimum"]},
                    "inequality_id": {"type": "string"},
                    "trial_index": {"type": "integer"},
                    "parameters": {"type": "object"},
                    "slack": _NUM_OR_NULL,
                    "rel_slack": _NUM_OR_NULL,
                    "sample": _WEIGHTED_SAMPLE,
                },
            },
        },
    },
}

SCHEMAS = {
    "report": REPORT_OUTPUT,
    "curve": CURVE_OUTPUT,
    "decompose": DECOMPOSE_OUTPUT,
    "stress": STRESS_OUTPUT,
}
