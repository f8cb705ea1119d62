"""Deterministic JSON writing with full-precision floats.

The standard library serializer renders floats with ``repr``, which is
shortest-round-trip but not a fixed digit count.  Artifacts here promise 17
significant digits (always lossless for IEEE doubles) and byte-stable output
for identical inputs, so we walk the structure ourselves.
"""
from __future__ import annotations

import json
import math


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float in JSON document")
    if x == int(x) and abs(x) < 1e16:
        # keep integral floats readable and unambiguous
        return f"{x:.1f}"
    return format(x, ".17g")


def _write(obj, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for idx, (key, val) in enumerate(obj.items()):
            out.append(f'{pad}  {json.dumps(str(key))}: ')
            _write(val, out, indent + 1)
            out.append(",\n" if idx < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple)) for v in items):
            out.append("[")
            for idx, val in enumerate(items):
                _write(val, out, indent)
                if idx < len(items) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for idx, val in enumerate(items):
            out.append(pad + "  ")
            _write(val, out, indent + 1)
            out.append(",\n" if idx < len(items) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dump_json(obj) -> str:
    """Render a JSON document deterministically; trailing newline included."""
    out: list[str] = []
    _write(obj, out, 0)
    out.append("\n")
    return "".join(out)
