"""CSV / JSON report emission with full double precision."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from pathlib import Path

__all__ = ["emit_report", "read_report", "format_number"]


def format_number(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return f"{v:.17e}"


def _columns(records):
    if not records:
        raise ValueError("no records to report")
    cls = type(records[0])
    if not dataclasses.is_dataclass(cls) or any(type(r) is not cls for r in records):
        raise TypeError("records must be instances of one dataclass")
    return [f.name for f in dataclasses.fields(cls)]


def _render_csv(records, cols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([v if isinstance(v, str) else format_number(v)
                    for v in (getattr(r, c) for c in cols)])
    return buf.getvalue()


def _render_json(records, cols) -> str:
    lines = []
    for r in records:
        items = []
        for c in cols:
            v = getattr(r, c)
            items.append(f"{json.dumps(c)}: " +
                         (json.dumps(v) if isinstance(v, str) else format_number(v)))
        lines.append("  {" + ", ".join(items) + "}")
    return "[\n" + ",\n".join(lines) + "\n]\n"


def emit_report(records, path, format: str = "csv") -> None:
    """Write records as CSV (header + one row each) or a JSON array.

    Column order follows the dataclass fields. Floats are written in
    ``%.17e`` form so they round-trip exactly.
    """
    records = list(records)
    cols = _columns(records)
    fmt = format.lower()
    if fmt == "csv":
        text = _render_csv(records, cols)
    elif fmt == "json":
        text = _render_json(records, cols)
    else:
        raise ValueError(f"unknown report format {format!r}")
    Path(path).write_text(text)


def _parse_cell(s: str):
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def read_report(path) -> list[dict]:
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("["):
        return json.loads(text)
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: _parse_cell(v) for k, v in row.items()} for row in rows]
