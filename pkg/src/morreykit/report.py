"""Deterministic report serialization: canonical JSON, flat CSV, config hash.

Byte-identical output is part of the contract: floats are rendered at 17
significant digits, keys are sorted, nothing time- or path-dependent is
embedded. Non-finite floats are encoded as the strings "Infinity",
"-Infinity", "NaN" so the JSON stays standard.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from pathlib import Path

__all__ = [
    "canonical_json",
    "config_hash",
    "report_to_dict",
    "write_report",
    "render_summary",
]


def _format_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} canonically")


def canonical_json(obj) -> str:
    """Sorted-key JSON with 17-significant-digit floats; deterministic."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def _plain(obj):
    """Recursively reduce dataclasses / numpy scalars / tuples to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


def config_hash(cfg) -> str:
    """SHA-256 of the canonical JSON of a config dataclass."""
    text = canonical_json(_plain(cfg))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def report_to_dict(report) -> dict:
    return _plain(report)


def _csv_text(report) -> str:
    rows = [_plain(r) for r in report.rows]
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    if not columns:
        columns = ["experiment", "status"]
        rows = [{"experiment": report.name, "status": report.status}]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, float):
                cells.append(format(value, ".17g"))
            else:
                cells.append(value)
        writer.writerow(cells)
    return buf.getvalue()


def _slug(name: str) -> str:
    return "".join(c if (c.isalnum() or c in "-_") else "-" for c in name) or "report"


def write_report(report, out_dir, formats=("json", "csv")) -> list[Path]:
    """Write one file per requested format; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    base = _slug(report.name)
    for fmt in formats:
        if fmt == "json":
            path = out / f"{base}.json"
            path.write_text(canonical_json(report_to_dict(report)) + "\n")
        elif fmt == "csv":
            path = out / f"{base}.csv"
            path.write_text(_csv_text(report))
        else:
            raise ValueError(f"unknown report format {fmt!r}; known: json, csv")
        written.append(path)
    return written


def render_summary(report) -> str:
    const = report.empirical_constant
    tail = "" if const is None else f"  constant={const:.6g}"
    return f"{report.name}: {report.status}{tail}"
