"""Deterministic JSON serialization and validation against the bundled schemas."""
from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

SCHEMAS = ("body", "claim", "report", "star", "metric", "suite")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}")
    text = resources.files("convsym").joinpath("schemas").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def validate(obj: dict, name: str) -> None:
    """Raise :class:`jsonschema.ValidationError` when ``obj`` violates schema ``name``."""
    jsonschema.validate(obj, load_schema(name))


def clean(obj):
    """Plain-JSON copy: numpy scalars and arrays unpacked, non-finite floats mapped to ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    """Byte-stable JSON text (sorted keys, fixed separators, trailing newline)."""
    return json.dumps(clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
