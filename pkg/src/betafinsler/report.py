"""Deterministic JSON serialisation of reports.

Floats are written with 17 significant digits so that every double
round-trips exactly, and non-finite values become ``null``.  Key order is
insertion order.  Re-emitting a parsed report reproduces it byte for byte.
"""
from __future__ import annotations

import json
import math

import numpy as np


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0"  # also folds -0.0, which would not survive a parse as an int
    return format(x, ".17g")


def dumps(obj) -> str:
    """Compact single-line JSON with fixed float formatting."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_stream(records, summary) -> str:
    """JSON Lines: one object per point followed by the summary object."""
    lines = [dumps(r) for r in records]
    lines.append(dumps(summary))
    return "\n".join(lines) + "\n"


def load_stream(text: str) -> list:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def reemit(text: str) -> str:
    """Parse a report stream and serialise it again."""
    objs = load_stream(text)
    return "\n".join(dumps(o) for o in objs) + "\n"
