"""Deterministic text serialization: 17-significant-digit floats for CSV and
JSON so identical runs produce byte-identical output files."""

from __future__ import annotations

import math


def sig17(x: float) -> str:
    """Render a float at 17 significant digits (shortest round-trip superset)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(float(x), ".17g")
    return s


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _json_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return sig17(v)
    if isinstance(v, str):
        out = ['"']
        for ch in v:
            if ch == '"':
                out.append('\\"')
            elif ch == "\\":
                out.append("\\\\")
            elif ord(ch) < 0x20:
                out.append("\\u%04x" % ord(ch))
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    raise TypeError(f"unsupported scalar {type(v)!r}")


def json_dumps(obj, indent: int = 0, _level: int = 0) -> str:
    """JSON writer with sig17 float formatting and stable key order.

    Dict keys keep insertion order (callers construct them deterministically).
    Complex numbers are not accepted; encode them as [re, im] first.
    """
    pad = " " * (indent * (_level + 1)) if indent else ""
    end_pad = " " * (indent * _level) if indent else ""
    sep = ",\n" if indent else ", "
    open_nl = "\n" if indent else ""
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{_json_scalar(str(k))}: {json_dumps(v, indent, _level + 1)}"
            for k, v in obj.items()
        ]
        return "{" + open_nl + sep.join(items) + open_nl + end_pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{json_dumps(v, indent, _level + 1)}" for v in seq]
        return "[" + open_nl + sep.join(items) + open_nl + end_pad + "]"
    if isinstance(obj, complex):
        raise TypeError("encode complex values as [re, im] pairs before dumping")
    return _json_scalar(obj)


def write_csv(path, header: list[str], rows) -> None:
    """Write rows of floats/ints/strings with LF endings and sig17 floats."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, float):
                    cells.append(sig17(v))
                elif isinstance(v, bool):
                    cells.append("true" if v else "false")
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")
