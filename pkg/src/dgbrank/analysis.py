"""Cross-stratum correlation of fitted parameters and UP values."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import stats

from .exceptions import DimensionError, InsufficientDataError

VARIABLES = ("a", "b", "up")


def _vectors(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 3:
        raise InsufficientDataError("correlation needs at least 3 pairs")
    return x, y


def pearson(xs, ys):
    """Product-moment correlation of two equally long vectors."""
    x, y = _vectors(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise InsufficientDataError("zero variance in an input")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def spearman(xs, ys):
    """Pearson correlation of mid-ranks (tied values share their average rank)."""
    x, y = _vectors(xs, ys)
    return pearson(stats.rankdata(x), stats.rankdata(y))


def t_statistic(r, n):
    if abs(r) >= 1.0:
        return math.copysign(math.inf, r)
    return r * math.sqrt((n - 2) / (1.0 - r * r))


def is_significant(r, n, level=0.95):
    """Two-sided t-approximation test of zero correlation."""
    crit = stats.t.ppf(0.5 + level / 2.0, n - 2)
    return abs(t_statistic(r, n)) > crit


@dataclass(frozen=True)
class CorrelationRow:
    left: str
    right: str
    statistic: str
    coefficient: float
    t: float
    significant_95: bool
    n_strata: int
    slope: float = float("nan")
    intercept: float = float("nan")


@dataclass
class CorrelationReport:
    """One row per variable pair per statistic (pearson, spearman)."""

    year: int
    n_strata: int
    strata: tuple
    rows: list = field(default_factory=list)

    @property
    def variable_pairs(self):
        seen = []
        for row in self.rows:
            if (row.left, row.right) not in seen:
                seen.append((row.left, row.right))
        return seen

    def _coef(self, statistic):
        return [r.coefficient for r in self.rows if r.statistic == statistic]

    @property
    def pearson(self):
        return self._coef("pearson")

    @property
    def spearman(self):
        return self._coef("spearman")

    @property
    def significant_95(self):
        return [r.significant_95 for r in self.rows]

    def any_significant(self):
        return any(r.significant_95 for r in self.rows)


# fitted values agree only to optimizer precision; below this spread a column is constant
_FLAT = 1e-9


def _flat(values):
    v = np.asarray(values, dtype=float)
    return np.ptp(v) <= _FLAT * max(1.0, float(np.max(np.abs(v))))


def _value(fit, variable):
    return {"a": fit.params.a, "b": fit.params.b, "up": fit.up}[variable]


def correlate_fits(fits, year):
    """Correlate fitted parameters and UP across strata, indicator against indicator.

    ``fits`` maps ``(stratum_id, indicator)`` to a FitResult.  Only strata
    with a fit for every indicator are used.  For each indicator pair and
    each of a, b and UP, Pearson and Spearman coefficients are computed and
    flagged at the 95% level.  When a Pearson coefficient is significant the
    least-squares line ``right = slope * left + intercept`` is attached.
    """
    indicators = sorted({ind for _, ind in fits})
    if len(indicators) < 2:
        raise InsufficientDataError("need fits for at least two indicators")
    strata = sorted(s for s in {s for s, _ in fits}
                    if all((s, ind) in fits for ind in indicators))
    n = len(strata)
    if n < 3:
        raise InsufficientDataError(f"only {n} strata have fits for every indicator (need 3)")
    report = CorrelationReport(int(year), n, tuple(strata))
    for left, right in combinations(indicators, 2):
        for var in VARIABLES:
            xs = [_value(fits[(s, left)], var) for s in strata]
            ys = [_value(fits[(s, right)], var) for s in strata]
            lname, rname = f"{left}:{var}", f"{right}:{var}"
            for statistic, func in (("pearson", pearson), ("spearman", spearman)):
                # a constant column carries no correlation information
                r = float("nan") if _flat(xs) or _flat(ys) else func(xs, ys)
                sig = bool(not math.isnan(r) and is_significant(r, n))
                slope = intercept = float("nan")
                if sig and statistic == "pearson":
                    fit = stats.linregress(xs, ys)
                    slope, intercept = float(fit.slope), float(fit.intercept)
                t = t_statistic(r, n) if not math.isnan(r) else float("nan")
                report.rows.append(CorrelationRow(lname, rname, statistic, r, t, sig, n,
                                                  slope, intercept))
    return report
