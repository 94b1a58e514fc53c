"""Deterministic JSON/CSV rendering: floats with 17 significant digits, ``inf`` as a string."""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        raise ValueError("NaN cannot be serialized")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = f"{x:.17g}"
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _emit(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        scalar = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items)
        out.append("[")
        for i, v in enumerate(items):
            if scalar:
                out.append(", " if i else "")
            else:
                out.append(("," if i else "") + pad)
            _emit(v, out, indent, level + 1)
        out.append("]" if scalar else end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(row[c]).strip('"') if isinstance(row[c], float) else row[c]
                         for c in columns])
    return buf.getvalue()
