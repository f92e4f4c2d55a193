"""Value <-> JSON mapping used at every stub/handler boundary.

Tuples travel as lists; objects travel as their attribute map.
"""
from __future__ import annotations

import json
import math

from .values import HIDDEN_CLASSNAME, ObjectInstance, RuntimeFault


def to_boundary(value):
    """Convert a runtime value into plain JSON-compatible data."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            raise RuntimeFault("ValueError", f"{value!r} is not JSON-representable")
        return value
    if isinstance(value, (list, tuple)):
        return [to_boundary(v) for v in value]
    if isinstance(value, dict):
        out = {}
        for k, v in value.items():
            if not isinstance(k, str):
                raise RuntimeFault("TypeError", f"map key {k!r} is not a string")
            out[k] = to_boundary(v)
        return out
    if isinstance(value, ObjectInstance):
        return {k: to_boundary(v) for k, v in value.attrs.items() if k != HIDDEN_CLASSNAME}
    raise RuntimeFault("TypeError", f"{value!r} is not JSON-representable")


def dumps(data) -> str:
    return json.dumps(data, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def loads(text: str):
    return json.loads(text)


def roundtrip(value):
    """Serialize to JSON text and parse it back."""
    return loads(dumps(to_boundary(value)))
