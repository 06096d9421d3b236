"""Synthetic rank-size series with known DGB parameters."""
from __future__ import annotations

import numpy as np

from .dgb_core import DgbParams, _draw, probabilities
from .exceptions import InvalidDomainError
from .series import RankSizeSeries

_CHUNK = 1 << 18


def _params(a, b, n):
    if int(n) != n or n < 2:
        raise InvalidDomainError(f"synthetic series need n >= 2, got {n!r}")
    return DgbParams(a, b, int(n))


def exact_series(a, b, n, total, stratum_id="SIM", year=0):
    """Sizes ``total * f(r)``: the MLE of this series is ``(a, b)`` itself."""
    if not total > 0:
        raise InvalidDomainError("total must be positive")
    p = _params(a, b, n)
    return RankSizeSeries.from_sizes(total * probabilities(p), stratum_id=stratum_id, year=year)


def sampled_counts(a, b, n, draws, seed):
    """Per-rank counts of ``draws`` inverse-CDF samples, generated in chunks."""
    if int(draws) != draws or draws < 1:
        raise InvalidDomainError(f"draws must be a positive integer, got {draws!r}")
    p = _params(a, b, n)
    rng = np.random.default_rng(seed)
    counts = np.zeros(p.n, dtype=np.int64)
    left = int(draws)
    while left:
        k = min(left, _CHUNK)
        counts += np.bincount(_draw(p, k, rng), minlength=p.n + 1)[1:]
        left -= k
    return counts


def sampled_series(a, b, n, draws, seed, stratum_id="SIM", year=0):
    """Monte Carlo series: rank ``r`` gets the number of draws that landed on it.

    Sizes stay attached to the generating ranks (they are not re-sorted), so
    the series can be non-monotone at small ``draws``.
    """
    counts = sampled_counts(a, b, n, draws, seed)
    return RankSizeSeries.from_sizes(counts.astype(float), stratum_id=stratum_id, year=year)
