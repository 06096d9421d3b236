"""Uncertainty Percentage (UP): fitted entropy as a share of its maximum."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dgb_core import entropy
from .exceptions import ComparisonError, UndefinedUPError


@dataclass(frozen=True)
class UncertaintyRecord:
    stratum_id: str
    indicator: str
    year: int
    n_units: int
    entropy: float
    up: float


def uncertainty_percentage(params, denominator_base=math.e):
    """Return ``entropy(params) / log(n) * 100``.

    The entropy is always in nats.  ``denominator_base`` sets the base of
    the ``log n`` term; the default keeps both in nats so a uniform fit scores
    exactly 100.  Passing ``2`` reproduces UP tables computed as natural-log
    entropy over ``log2 n``, whose ceiling is ``100 * ln 2`` (about 69.31).
    """
    if params.n < 2:
        raise UndefinedUPError(f"UP is undefined for n={params.n} (needs n >= 2)")
    log_n = math.log(params.n)
    if denominator_base != math.e:
        log_n /= math.log(denominator_base)
    return entropy(params) / log_n * 100.0


def uncertainty_record(params, stratum_id, indicator, year, denominator_base=math.e):
    return UncertaintyRecord(stratum_id, indicator, int(year), params.n, entropy(params),
                             uncertainty_percentage(params, denominator_base))


def up_delta(rec_t1, rec_t2):
    """Year-over-year change ``up(t2) - up(t1)`` for the same stratum and indicator."""
    if rec_t1.stratum_id != rec_t2.stratum_id or rec_t1.indicator != rec_t2.indicator:
        raise ComparisonError(
            f"cannot compare {rec_t1.stratum_id}/{rec_t1.indicator} "
            f"with {rec_t2.stratum_id}/{rec_t2.indicator}")
    return rec_t2.up - rec_t1.up
