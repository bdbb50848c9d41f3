"""Deterministic JSON output: sorted keys, floats at 17 significant digits.

Python's repr would round-trip doubles too, but pinning the format makes
output artifacts byte-identical across interpreter versions, which the CLI
promises for identical config and seed.
"""

from __future__ import annotations

import math


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return f"{x:.17g}"


def dumps(obj, indent: int = 0) -> str:
    text = _write(obj, indent, 0)
    return text + "\n" if indent else text


def _write(obj, indent: int, level: int) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _format_float(obj)
    if isinstance(obj, str):
        return _escape(obj)
    if isinstance(obj, dict):
        for key in obj:
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
        items = [(_escape(k) + ": " + _write(obj[k], indent, level + 1)) for k in sorted(obj)]
        return _wrap(items, "{", "}", indent, level)
    if isinstance(obj, (list, tuple)):
        items = [_write(v, indent, level + 1) for v in obj]
        return _wrap(items, "[", "]", indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _wrap(items: list[str], opener: str, closer: str, indent: int, level: int) -> str:
    if not items:
        return opener + closer
    if not indent:
        return opener + ", ".join(items) + closer
    pad = " " * (indent * (level + 1))
    return opener + "\n" + ",\n".join(pad + it for it in items) + "\n" + " " * (indent * level) + closer


def _escape(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out) + '"'
