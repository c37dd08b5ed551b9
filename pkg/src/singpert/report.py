"""Deterministic JSON/CSV text output with 17 significant digits."""
import math

import numpy as np


def fmt_float(v):
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if v == 0:
        return "0"  # collapses -0.0 as well
    return format(v, ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1)) if indent else ""
    end = " " * (indent * level) if indent else ""
    sep = ",\n" if indent else ","
    nl = "\n" if indent else ""
    colon = ": " if indent else ":"
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    if isinstance(obj, str):
        return _quote(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + _quote(str(k)) + colon + _encode(v, indent, level + 1)
                 for k, v in obj.items()]
        return "{" + nl + sep.join(items) + nl + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + nl + sep.join(items) + nl + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _quote(s):
    import json
    return json.dumps(s)


def dumps(obj, indent=2):
    """JSON text; floats printed with 17 significant digits, keys in order."""
    return _encode(obj, indent, 0) + "\n"


def csv_lines(header, rows):
    """CSV text with the same float formatting as :func:`dumps`."""
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return fmt_float(v)
        return str(v)
    out = [",".join(header)]
    out.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(out) + "\n"


def complex_text(z):
    """``a+bi`` rendering used for human-facing complex values."""
    im = fmt_float(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{fmt_float(z.real)}{sign}{im}i"
