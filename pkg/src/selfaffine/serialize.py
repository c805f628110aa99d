"""JSON text with floats written at 17 significant digits.

``json.dumps`` uses the shortest round-trip repr; we want a fixed, documented
format so emitted files diff cleanly and parse back bit-exactly.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np


def format_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v}")
    s = format(v, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _emit(obj: Any, out: list[str], indent: int | None, level: int) -> None:
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        pad, inner = _pads(indent, level)
        out.append("{")
        for k, (key, val) in enumerate(obj.items()):
            if k:
                out.append(",")
            out.append(inner)
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(val, out, indent, level + 1)
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        # leaf arrays of numbers stay on one line
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items)
        pad, inner = ("", "") if flat else _pads(indent, level)
        out.append("[")
        for k, val in enumerate(items):
            if k:
                out.append(", " if flat else ",")
            out.append(inner)
            _emit(val, out, indent, level + 1)
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _pads(indent: int | None, level: int) -> tuple[str, str]:
    if indent is None:
        return "", ""
    return "\n" + " " * (indent * level), "\n" + " " * (indent * (level + 1))


def dumps(obj: Any, indent: int | None = 1) -> str:
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


loads = json.loads
