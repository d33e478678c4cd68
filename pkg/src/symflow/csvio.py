"""Diff-stable CSV output: a config comment line, a header row, then data rows."""
from __future__ import annotations

import io
import json
import math

import numpy as np

PROVENANCE_PREFIX = "# config: "


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    # 12 significant digits
    return f"{x:.11e}"


def render_csv(header, rows, provenance: dict | None = None) -> str:
    buf = io.StringIO()
    if provenance is not None:
        buf.write(PROVENANCE_PREFIX + json.dumps(provenance, sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def csv_body(text: str) -> str:
    """Everything after the provenance line."""
    lines = text.split("\n")
    if lines and lines[0].startswith(PROVENANCE_PREFIX):
        lines = lines[1:]
    return "\n".join(lines)


def read_csv(text: str):
    """Parse rendered CSV back into (provenance, header, rows of floats)."""
    lines = [ln for ln in text.split("\n") if ln]
    provenance = None
    if lines and lines[0].startswith(PROVENANCE_PREFIX):
        provenance = json.loads(lines[0][len(PROVENANCE_PREFIX):])
        lines = lines[1:]
    header = lines[0].split(",")
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return provenance, header, rows
