"""Rank-size series container."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import SeriesValidationError

INDICATORS = ("population", "lr", "wpr", "sr-lr", "sr-wpr", "custom")


def check_indicator(label):
    """Validate an indicator label; ``custom:<column>`` is accepted as custom."""
    base = label.split(":", 1)[0]
    if base not in INDICATORS:
        raise SeriesValidationError(f"unknown indicator {label!r}")
    if base == "custom" and (":" not in label or not label.split(":", 1)[1]):
        raise SeriesValidationError("custom indicator needs a column name: custom:<column>")
    return label


@dataclass(frozen=True, eq=False)
class RankSizeSeries:
    """One stratum's (unit, rank, size) observations for one indicator and year.

    Entries are stored in rank order.  Ranks must be exactly ``1..N``.
    Sizes are non-negative reals, at least one positive.  Monotone ordering
    of sizes is *not* required here (synthetic and reversed series break it);
    ``is_rank_ordered`` reports it and the data pipeline guarantees it.
    """

    stratum_id: str
    indicator: str
    year: int
    unit_ids: tuple
    ranks: np.ndarray
    sizes: np.ndarray

    def __post_init__(self):
        check_indicator(self.indicator)
        ranks = np.asarray(self.ranks)
        sizes = np.asarray(self.sizes, dtype=float)
        ids = tuple(str(u) for u in self.unit_ids)
        n = len(sizes)
        if ranks.ndim != 1 or sizes.ndim != 1 or len(ranks) != n or len(ids) != n:
            raise SeriesValidationError("unit_ids, ranks and sizes must be 1-d and equally long")
        if n == 0:
            raise SeriesValidationError("series is empty")
        if ranks.dtype.kind not in "iu":
            if not np.all(np.mod(ranks, 1) == 0):
                raise SeriesValidationError("ranks must be integers")
            ranks = ranks.astype(np.int64)
        if not np.array_equal(np.sort(ranks), np.arange(1, n + 1)):
            raise SeriesValidationError("ranks must be exactly 1..N without duplicates")
        if not np.all(np.isfinite(sizes)) or np.any(sizes < 0):
            raise SeriesValidationError("sizes must be finite and non-negative")
        if not np.any(sizes > 0):
            raise SeriesValidationError("at least one size must be positive")
        order = np.argsort(ranks, kind="stable")
        ranks = ranks[order]
        sizes = sizes[order]
        ranks.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "unit_ids", tuple(ids[i] for i in order))

    @classmethod
    def from_sizes(cls, sizes, stratum_id="series", indicator="custom:size", year=0, unit_ids=None):
        """Build a series whose i-th size has rank i + 1."""
        sizes = np.asarray(sizes, dtype=float)
        if unit_ids is None:
            width = max(4, len(str(len(sizes))))
            unit_ids = [f"u{i:0{width}d}" for i in range(1, len(sizes) + 1)]
        return cls(stratum_id, indicator, int(year), tuple(unit_ids),
                   np.arange(1, len(sizes) + 1), sizes)

    @property
    def n(self):
        return len(self.sizes)

    @property
    def total(self):
        return float(self.sizes.sum())

    @property
    def entries(self):
        return [(u, int(r), float(x)) for u, r, x in zip(self.unit_ids, self.ranks, self.sizes)]

    @property
    def is_rank_ordered(self):
        return bool(np.all(np.diff(self.sizes) <= 0))

    def scaled(self, factor):
        return RankSizeSeries(self.stratum_id, self.indicator, self.year, self.unit_ids,
                              self.ranks, self.sizes * factor)

    def reversed(self):
        """Rank ``r`` receives the size formerly at rank ``N + 1 - r``."""
        return RankSizeSeries(self.stratum_id, self.indicator, self.year,
                              self.unit_ids[::-1], self.ranks, self.sizes[::-1])
