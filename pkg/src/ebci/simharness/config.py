"""JSON simulation configs: schema, validation and expansion into cells.

A config document holds ``defaults`` (any :class:`SimConfig` field) and an
optional ``grid`` of lists whose Cartesian product is taken in key order, for
example::

    {"defaults": {"dgp": "cusp", "support": "interior", "B": 2000, "seed": 7},
     "grid": {"delta": [0.01, 0.1, 1], "n": [100, 1000]}}

An explicit ``cells`` list of partial configs may be given instead of a grid.
"""
from __future__ import annotations

import itertools
import json
from importlib import resources
from pathlib import Path

import jsonschema

from .mc import DGPS, METHODS, SimConfig

__all__ = ["CONFIG_SCHEMA", "ConfigError", "expand_config", "load_config", "bundled_config_names"]

_FIELD_SCHEMA = {
    "dgp": {"enum": list(DGPS)},
    "n": {"type": "integer", "minimum": 4},
    "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "method": {"enum": list(METHODS)},
    "side": {"enum": ["two", "upper", "lower"]},
    "x0": {"type": "number"},
    "B": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer", "minimum": 0},
    "S": {"type": "integer", "minimum": 1},
    "delta": {"type": "number", "exclusiveMinimum": 0},
    "error_kind": {"enum": ["normal", "skewed_gamma"]},
    "support": {"enum": ["interior", "boundary"]},
    "eta": {"type": ["number", "null"], "exclusiveMinimum": 0},
    "tau": {"type": "number", "exclusiveMinimum": 0},
    "boundary": {"enum": ["interior", "left", "right", "auto", None]},
    "unified_calibration": {"type": ["boolean", "null"]},
}

_PARTIAL = {"type": "object", "properties": _FIELD_SCHEMA, "additionalProperties": False}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "defaults": _PARTIAL,
        "grid": {
            "type": "object",
            "properties": {k: {"type": "array", "minItems": 1, "items": v} for k, v in _FIELD_SCHEMA.items()},
            "additionalProperties": False,
        },
        "cells": {"type": "array", "minItems": 1, "items": _PARTIAL},
    },
    "additionalProperties": False,
    "not": {"required": ["grid", "cells"]},
}


class ConfigError(ValueError):
    """Invalid simulation config; ``pointer`` locates the offending field."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def _pointer(path) -> str:
    return "".join(f"/{str(p).replace('~', '~0').replace('/', '~1')}" for p in path)


def _validate(doc):
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        message = err.message
        if err.validator == "not":
            message = "give either 'grid' or 'cells', not both"
        raise ConfigError(_pointer(err.absolute_path), message)


def expand_config(doc: dict, reps: int | None = None, seed: int | None = None) -> list[SimConfig]:
    """Validate a config document and expand it into simulation cells.

    ``reps`` and ``seed`` override ``B`` and ``seed`` in every cell.
    """
    _validate(doc)
    defaults = dict(doc.get("defaults", {}))
    if "cells" in doc:
        partials = [(f"/cells/{i}", cell) for i, cell in enumerate(doc["cells"])]
    else:
        grid = doc.get("grid", {})
        keys = list(grid)
        partials = [
            ("/grid", dict(zip(keys, combo))) for combo in itertools.product(*(grid[k] for k in keys))
        ]
    out = []
    for where, partial in partials:
        merged = {**defaults, **partial}
        if reps is not None:
            merged["B"] = reps
        if seed is not None:
            merged["seed"] = seed
        try:
            out.append(SimConfig(**merged))
        except ValueError as exc:
            raise ConfigError(where, str(exc)) from None
    return out


def bundled_config_names() -> list[str]:
    root = resources.files("ebci.data")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path, reps: int | None = None, seed: int | None = None) -> list[SimConfig]:
    """Load a config file, falling back to a bundled config of the same name."""
    path = Path(path)
    if path.exists():
        text = path.read_text("utf-8")
    elif path.name in bundled_config_names():
        text = resources.files("ebci.data").joinpath(path.name).read_text("utf-8")
    else:
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return expand_config(doc, reps=reps, seed=seed)
