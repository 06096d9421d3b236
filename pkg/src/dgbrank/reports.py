"""Report file schemas and their CSV / JSON writers and readers.

Column order is part of the schema.  CSV tables round exponents and KS to
3 decimals and UP to 2 (entropy to 4); JSON keeps full float precision.
Both are written with fixed ordering so identical runs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .exceptions import CsvFormatError

FIT_SCHEMA = "dgbrank.fit/1"
CORRELATION_SCHEMA = "dgbrank.correlation/1"
COMPARE_SCHEMA = "dgbrank.compare/1"

FIT_COLUMNS = ("stratum", "indicator", "year", "n", "a", "b", "ks", "entropy", "up",
               "log_likelihood", "converged", "iterations", "restarts_used", "method",
               "status", "reason", "pooled")
CORRELATION_COLUMNS = ("year", "left", "right", "statistic", "coefficient", "t",
                       "significant_95", "n_strata", "slope", "intercept")
COMPARE_COLUMNS = ("stratum", "indicator", "year_1", "year_2", "n_1", "n_2",
                   "a_1", "a_2", "b_1", "b_2", "up_1", "up_2",
                   "delta_a", "delta_b", "delta_up")

_DECIMALS = {"a": 3, "b": 3, "ks": 3, "up": 2, "entropy": 4, "log_likelihood": 6,
             "a_1": 3, "a_2": 3, "b_1": 3, "b_2": 3, "up_1": 2, "up_2": 2,
             "delta_a": 3, "delta_b": 3, "delta_up": 2}

_INT = {"year", "n", "iterations", "restarts_used", "n_strata", "year_1", "year_2",
        "n_1", "n_2"}
_BOOL = {"converged", "pooled", "significant_95"}
_STR = {"stratum", "indicator", "method", "status", "reason", "left", "right", "statistic"}


def _cell(column, value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if column in _DECIMALS:
            text = f"{value:.{_DECIMALS[column]}f}"
            return text[1:] if text.startswith("-") and float(text) == 0 else text
        return repr(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def render_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(c, row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(meta, rows, columns):
    doc = dict(meta)
    doc["columns"] = list(columns)
    doc["rows"] = [{c: _jsonable(row.get(c)) for c in columns} for row in rows]
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_report(out_dir, stem, meta, rows, columns, fmt="both"):
    """Write ``<stem>.csv`` and/or ``<stem>.json``; return the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if fmt in ("csv", "both"):
        p = out / f"{stem}.csv"
        p.write_text(render_csv(rows, columns), encoding="utf-8")
        paths.append(p)
    if fmt in ("json", "both"):
        p = out / f"{stem}.json"
        p.write_text(render_json(meta, rows, columns), encoding="utf-8")
        paths.append(p)
    return paths


def _typed(column, text):
    if text == "" or text is None:
        return float("nan") if column not in _STR | _BOOL | _INT else None
    if column in _INT:
        return int(text)
    if column in _BOOL:
        return text in ("true", True)
    if column in _STR:
        return text
    return float(text)


def _from_json(column, value):
    if value is None:
        return None if column in _STR | _BOOL | _INT else float("nan")
    if isinstance(value, str) and column not in _STR:
        return float(value)
    if isinstance(value, int) and not isinstance(value, bool) and column not in _INT:
        return float(value)
    return value


def read_report(path, schema):
    """Load a report written by :func:`write_report` (CSV or JSON).

    Returns ``(meta, rows)``.  CSV files carry no metadata beyond their rows,
    so ``meta`` is empty for them.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise CsvFormatError(f"{path}: invalid JSON ({err})") from None
        if doc.get("schema") != schema:
            raise CsvFormatError(f"{path}: expected schema {schema}, found {doc.get('schema')}")
        rows = [{c: _from_json(c, v) for c, v in r.items()} for r in doc["rows"]]
        meta = {k: v for k, v in doc.items() if k not in ("rows", "columns")}
        return meta, rows
    reader = csv.DictReader(io.StringIO(text))
    expected = {FIT_SCHEMA: FIT_COLUMNS, CORRELATION_SCHEMA: CORRELATION_COLUMNS,
                COMPARE_SCHEMA: COMPARE_COLUMNS}[schema]
    if tuple(reader.fieldnames or ()) != expected:
        raise CsvFormatError(f"{path}: header does not match the {schema} columns")
    rows = []
    for row in reader:
        try:
            rows.append({c: _typed(c, row[c]) for c in expected})
        except ValueError as err:
            raise CsvFormatError(f"{path}: line {reader.line_num}: {err}") from None
    return {}, rows
