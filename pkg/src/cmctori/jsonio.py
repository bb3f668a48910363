"""Deterministic JSON emission.

All floats are written with 17 significant digits so that values round-trip
exactly and regression fixtures compare byte-for-byte.  Complex numbers are
emitted as [re, im] pairs by the callers before serialisation.
"""

from __future__ import annotations

import math

__all__ = ["dumps", "complex_pair", "format_float"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _emit(obj, indent: int, pieces: list):
    pad = "  " * indent
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        pieces.append(format_float(obj))
    elif isinstance(obj, str):
        escaped = (
            obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        )
        pieces.append(f'"{escaped}"')
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        keys = sorted(obj.keys())
        for i, k in enumerate(keys):
            pieces.append("  " * (indent + 1) + f'"{k}": ')
            _emit(obj[k], indent + 1, pieces)
            pieces.append(",\n" if i + 1 < len(keys) else "\n")
        pieces.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            pieces.append("[]")
            return
        flat = all(isinstance(v, (int, float, bool)) or v is None for v in obj)
        if flat:
            inner = ", ".join(
                format_float(v)
                if isinstance(v, float)
                else ("true" if v is True else "false" if v is False else
                      "null" if v is None else str(v))
                for v in obj
            )
            pieces.append(f"[{inner}]")
            return
        pieces.append("[\n")
        for i, v in enumerate(obj):
            pieces.append("  " * (indent + 1))
            _emit(v, indent + 1, pieces)
            pieces.append(",\n" if i + 1 < len(obj) else "\n")
        pieces.append(pad + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, 17-significant-digit floats."""
    pieces: list = []
    _emit(obj, 0, pieces)
    pieces.append("\n")
    return "".join(pieces)
