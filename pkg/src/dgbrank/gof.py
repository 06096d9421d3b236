"""Kolmogorov-Smirnov style fit error on cumulative rank-sizes."""
from __future__ import annotations

import numpy as np

from .dgb_core import probabilities
from .exceptions import DimensionError


def cumulative_gaps(series, params):
    """Signed gaps between predicted and observed cumulative shares, in rank order.

    Both curves are divided by the total size ``T`` so each ends at 1.
    """
    if params.n != series.n:
        raise DimensionError(f"params cover {params.n} ranks, series has {series.n}")
    shares = series.sizes / series.sizes.sum()
    predicted = probabilities(params)[series.ranks - 1]
    return np.cumsum(predicted) - np.cumsum(shares)


def ks_measure(series, params):
    """Maximum absolute gap between predicted and observed cumulative sizes over ``T``.

    Predicted sizes are ``T * f(r_i)`` with ``T`` the series total, so the
    returned statistic lies in [0, 1] and does not depend on the units of
    the sizes.
    """
    gaps = cumulative_gaps(series, params)
    # both curves end at T, so the last gap only carries rounding
    assert abs(gaps[-1]) < 1e-9, gaps[-1]
    return float(min(np.max(np.abs(gaps)), 1.0))
