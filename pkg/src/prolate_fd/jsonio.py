"""Deterministic JSON emission with 17 significant digits for floats.

The stdlib encoder prints the shortest round-trip repr, which varies in
length.  Fixed-width output keeps re-runs byte-identical across platforms.
"""
import json
import math

import numpy as np


def _fmt_float(x):
    if not math.isfinite(x):
        raise ValueError("non-finite value cannot be serialized: %r" % x)
    s = "%.17g" % x
    # keep it a JSON number that reads back as float
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _emit(obj, out, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = "," if indent is None else ","
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        first = True
        for k, v in obj.items():
            if not first:
                out.append(sep)
            first = False
            out.append(pad)
            out.append(json.dumps(str(k)))
            out.append(": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        if len(seq) == 0:
            out.append("[]")
            return
        # numeric rows stay on one line so arrays remain readable
        flat = all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in seq)
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(", " if flat or indent is None else sep)
            if not flat:
                out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append("]" if flat else end + "]")
    else:
        raise TypeError("cannot serialize %r" % type(obj))


def dumps(obj, indent=1):
    out = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"
