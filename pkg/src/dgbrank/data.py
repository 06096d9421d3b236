"""Unit-level census records: CSV ingestion, indicators, strata and ranking.

Input CSV (UTF-8, header row required)::

    state,district,year,pop_t,pop_m,pop_f,lit_t,lit_m,lit_f,work_t,work_m,work_f

``state``, ``district`` and ``year`` are mandatory.  Count columns may be
left out when the indicators in use do not need them.  Any further column
is kept as a numeric custom value, addressable as ``custom:<column>``.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import (
    CsvFormatError,
    ExclusionError,
    IndicatorUndefinedError,
)
from .series import RankSizeSeries, check_indicator

log = logging.getLogger(__name__)

KEY_COLUMNS = ("state", "district", "year")
COUNT_COLUMNS = ("pop_t", "pop_m", "pop_f", "lit_t", "lit_m", "lit_f",
                 "work_t", "work_m", "work_f")
CENSUS_COLUMNS = KEY_COLUMNS + COUNT_COLUMNS

# numerator and denominator columns for each rate indicator
_RATES = {
    "lr": ("lit_t", "pop_t"),
    "wpr": ("work_t", "pop_t"),
    "sr-lr": ("lit_f", "lit_m"),
    "sr-wpr": ("work_f", "work_m"),
}


@dataclass(frozen=True)
class UnitRecord:
    """Raw counts for one second-tier unit (district) in one year."""

    state: str
    district: str
    year: int
    pop_t: Optional[int] = None
    pop_m: Optional[int] = None
    pop_f: Optional[int] = None
    lit_t: Optional[int] = None
    lit_m: Optional[int] = None
    lit_f: Optional[int] = None
    work_t: Optional[int] = None
    work_m: Optional[int] = None
    work_f: Optional[int] = None
    extra: dict = field(default_factory=dict, compare=False)

    def problems(self):
        """Invariant violations, as human-readable strings."""
        out = []
        for sex in "tmf":
            pop = getattr(self, f"pop_{sex}")
            for what in ("lit", "work"):
                v = getattr(self, f"{what}_{sex}")
                if pop is not None and v is not None and v > pop:
                    out.append(f"{what}_{sex} ({v}) exceeds pop_{sex} ({pop})")
        for what in ("pop", "lit", "work"):
            t, m, f = (getattr(self, f"{what}_{s}") for s in "tmf")
            if None not in (t, m, f) and m + f != t:
                out.append(f"{what}_m + {what}_f ({m} + {f}) != {what}_t ({t})")
        return out


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str

    def __str__(self):
        return f"line {self.line}: {self.reason}"


@dataclass
class CsvLoad:
    """Result of :func:`load_csv`: accepted records plus the reject report."""

    path: str
    columns: tuple
    records: list
    rejects: list
    warnings: list = field(default_factory=list)

    @property
    def rows_read(self):
        return len(self.records) + len(self.rejects)

    def summary(self):
        return (f"{self.path}: {self.rows_read} rows read, {len(self.records)} accepted, "
                f"{len(self.rejects)} rejected")


def _parse_count(text, column):
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{column}: not a number: {text!r}") from None
    if not math.isfinite(value) or value < 0 or value != int(value):
        raise ValueError(f"{column}: expected a non-negative integer, got {text!r}")
    return int(value)


def _parse_extra(text, column):
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{column}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"{column}: not finite: {text!r}")
    return value


def load_csv(path, schema="census"):
    """Read and validate unit records from ``path``.

    Malformed rows are not fatal: each is recorded in ``rejects`` with its
    line number.  Raises ``CsvFormatError`` for a header that lacks the key
    columns and lets ``OSError`` through for unreadable files.
    """
    if schema != "census":
        raise CsvFormatError(f"unknown schema {schema!r} (supported: census)")
    path = str(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            log.warning("%s is empty", path)
            return CsvLoad(path, (), [], [], [f"{path} is empty"])
        header = [h.strip() for h in header]
        missing = [c for c in KEY_COLUMNS if c not in header]
        if missing:
            raise CsvFormatError(f"{path}: header lacks required column(s) {', '.join(missing)}")
        dupes = sorted({h for h in header if header.count(h) > 1})
        if dupes:
            raise CsvFormatError(f"{path}: duplicate column(s) {', '.join(dupes)}")
        records, rejects, seen = [], [], {}
        for row in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                rejects.append(RowError(line, f"expected {len(header)} fields, got {len(row)}"))
                continue
            cells = dict(zip(header, row))
            try:
                rec = _record(cells)
            except ValueError as err:
                rejects.append(RowError(line, str(err)))
                continue
            problems = rec.problems()
            if problems:
                rejects.append(RowError(line, "invariant violation: " + "; ".join(problems)))
                continue
            key = (rec.state, rec.district, rec.year)
            if key in seen:
                rejects.append(RowError(line, f"duplicate of line {seen[key]} "
                                              f"({rec.state}/{rec.district}/{rec.year})"))
                continue
            seen[key] = line
            records.append(rec)
    load = CsvLoad(path, tuple(header), records, rejects)
    if not records and not rejects:
        load.warnings.append(f"{path} has a header but no data rows")
        log.warning(load.warnings[-1])
    log.info(load.summary())
    return load


def _record(cells):
    state = cells["state"].strip()
    district = cells["district"].strip()
    if not state or not district:
        raise ValueError("state and district must be non-empty")
    try:
        year = int(cells["year"].strip())
    except ValueError:
        raise ValueError(f"year: not an integer: {cells['year']!r}") from None
    counts = {c: _parse_count(cells[c], c) for c in COUNT_COLUMNS if c in cells}
    extra = {}
    for c, v in cells.items():
        if c in CENSUS_COLUMNS:
            continue
        value = _parse_extra(v, c)
        if value is not None:
            extra[c] = value
    return UnitRecord(state, district, year, extra=extra, **counts)


def required_columns(indicator):
    """CSV columns an indicator reads."""
    check_indicator(indicator)
    if indicator == "population":
        return ("pop_t",)
    if indicator.startswith("custom:"):
        return (indicator.split(":", 1)[1],)
    return _RATES[indicator]


def derive_indicator(record, indicator):
    """Indicator value for one unit.

    ``population`` is the raw total; LR and WPR are percentages of the total
    population; SR-LR and SR-WPR are female-to-male ratios times 100.
    """
    check_indicator(indicator)
    if indicator == "population":
        if record.pop_t is None:
            raise IndicatorUndefinedError(f"{record.district}: pop_t missing")
        return float(record.pop_t)
    if indicator.startswith("custom:"):
        column = indicator.split(":", 1)[1]
        value = record.extra.get(column)
        if value is None:
            raise IndicatorUndefinedError(f"{record.district}: {column} missing")
        if value < 0:
            raise IndicatorUndefinedError(f"{record.district}: {column} is negative")
        return float(value)
    num_col, den_col = _RATES[indicator]
    num = getattr(record, num_col)
    den = getattr(record, den_col)
    if num is None or den is None:
        raise IndicatorUndefinedError(f"{record.district}: {num_col} or {den_col} missing")
    if den == 0:
        raise IndicatorUndefinedError(f"{record.district}: {den_col} is zero")
    return num / den * 100.0


@dataclass
class StratumDataset:
    """All units of one stratum (state) in one year."""

    stratum_id: str
    year: int
    units: list
    included: bool
    exclusion_reason: Optional[str] = None
    pooled: bool = False

    def unit_id(self, record):
        return f"{record.state}/{record.district}" if self.pooled else record.district


def _dataset(stratum_id, year, units, min_units, pooled=False):
    units = sorted(units, key=lambda r: (r.state, r.district))
    ok = len(units) >= min_units
    reason = None if ok else f"fewer than {min_units} units"
    return StratumDataset(stratum_id, year, units, ok, reason, pooled)


def group_strata(records, year, min_units=5, pool_label=None):
    """Group one year's records by state.

    With ``pool_label`` set and more than one state present, a country-level
    stratum of that name (all units pooled) is placed first.
    """
    rows = [r for r in records if r.year == year]
    by_state = {}
    for r in rows:
        by_state.setdefault(r.state, []).append(r)
    out = [_dataset(s, year, by_state[s], min_units) for s in sorted(by_state)]
    if pool_label is not None and len(by_state) > 1:
        if pool_label in by_state:
            raise CsvFormatError(f"pool label {pool_label!r} clashes with a state name")
        out.insert(0, _dataset(pool_label, year, rows, min_units, pooled=True))
    return out


def build_series(dataset, indicator):
    """Rank a stratum's units by indicator value, largest first.

    Ties are broken by ascending unit id.  Units whose indicator is
    undefined are dropped with a warning.
    """
    if not dataset.included:
        raise ExclusionError(dataset.stratum_id, dataset.exclusion_reason)
    pairs = []
    for rec in dataset.units:
        try:
            value = derive_indicator(rec, indicator)
        except IndicatorUndefinedError as err:
            log.warning("%s/%s: dropping unit: %s", dataset.stratum_id, indicator, err)
            continue
        pairs.append((dataset.unit_id(rec), value))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    ids = tuple(p[0] for p in pairs)
    sizes = np.array([p[1] for p in pairs], dtype=float)
    return RankSizeSeries(dataset.stratum_id, indicator, dataset.year, ids,
                          np.arange(1, len(pairs) + 1), sizes)
