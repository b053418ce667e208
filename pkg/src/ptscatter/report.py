"""Deterministic CSV/JSON rendering of command reports.

Reals are written with 17 significant digits, complex numbers as ``re``/``im``
pairs, and non-finite numbers as the token ``divergent``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Any

import numpy as np

DIVERGENT = "divergent"


def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return DIVERGENT
    return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0.0


def _normalise(value: Any) -> Any:
    """Reduce numpy scalars/arrays and complex numbers to plain JSON-like values."""
    if isinstance(value, dict):
        return {str(k): _normalise(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_normalise(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (float, np.floating)):
        return float(value)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def _json_text(value: Any, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_json_text(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(_json_text(v) for v in value) + "]"
        items = [inner + _json_text(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        text = format_real(value)
        return json.dumps(text) if text == DIVERGENT else text
    return json.dumps(value)


def to_json(document: Any) -> str:
    return _json_text(_normalise(document)) + "\n"


def _flatten(value: Any, prefix: str, out: dict):
    if isinstance(value, dict):
        if set(value) == {"re", "im"}:
            out[f"{prefix}_re"] = value["re"]
            out[f"{prefix}_im"] = value["im"]
            return
        for k, v in value.items():
            _flatten(v, f"{prefix}_{k}" if prefix else k, out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(v, f"{prefix}_{i}", out)
    else:
        out[prefix] = value


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return format_real(value)
    return str(value)


def to_csv(records: list[dict]) -> str:
    """One row per record; nested values become underscore-joined columns."""
    flat = []
    for rec in records:
        row: dict = {}
        _flatten(_normalise(rec), "", row)
        flat.append(row)
    columns: list[str] = []
    for row in flat:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in flat:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def parse_real(text: str) -> float:
    """Inverse of :func:`format_real` (``divergent`` reads back as infinity)."""
    return math.inf if text == DIVERGENT else float(text)
