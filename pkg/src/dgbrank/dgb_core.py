"""Discrete generalized beta (DGB) rank-order distribution.

The pmf on ranks ``r = 1..n`` is

    f(r) = A (n + 1 - r)**b / r**a

with ``A`` chosen so the masses sum to one.  Everything here works with the
per-rank log-weights ``b*log(n+1-r) - a*log(r)`` so that large exponents or
long rank ranges never overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .exceptions import InvalidDomainError, InvalidParameterError, InvalidRankError

__all__ = [
    "DgbParams",
    "log_rank_terms",
    "log_weights",
    "log_normalizer",
    "probabilities",
    "pmf",
    "log_pmf",
    "cdf",
    "entropy",
    "sample",
]


def _check_args(a, b, n):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidParameterError(f"exponents must be finite reals, got a={a!r}, b={b!r}")
    if int(n) != n or n < 1:
        raise InvalidDomainError(f"n must be a positive integer, got {n!r}")


def log_rank_terms(n):
    """Return ``(log r, log(n+1-r))`` for r = 1..n as two float arrays."""
    r = np.arange(1, n + 1, dtype=float)
    return np.log(r), np.log(n + 1 - r)


def log_weights(a, b, n):
    """Unnormalized log-masses ``b*log(n+1-r) - a*log(r)`` for r = 1..n."""
    log_r, log_rev = log_rank_terms(n)
    return b * log_rev - a * log_r


def log_normalizer(a, b, n):
    """Log of the normalizing constant ``A``.

    Raises
    ------
    InvalidParameterError
        If ``a`` or ``b`` is not finite.
    InvalidDomainError
        If ``n`` is not a positive integer.
    """
    a = float(a)
    b = float(b)
    _check_args(a, b, n)
    return -float(logsumexp(log_weights(a, b, int(n))))


@dataclass(frozen=True)
class DgbParams:
    """Parameter pair ``(a, b)`` on ``n`` ranks, with the cached log-normalizer."""

    a: float
    b: float
    n: int
    log_norm: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_args(self.a, self.b, self.n)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "log_norm", log_normalizer(self.a, self.b, self.n))

    def swapped(self):
        """Parameters of the rank-reversed distribution, ``(b, a)``."""
        return DgbParams(self.b, self.a, self.n)


def _ranks(params, r):
    arr = np.asarray(r)
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise InvalidRankError(f"ranks must be integers, got {r!r}")
        arr = arr.astype(np.int64)
    if np.any(arr < 1) or np.any(arr > params.n):
        raise InvalidRankError(f"rank out of range 1..{params.n}: {r!r}")
    return arr


def probabilities(params):
    """Full pmf vector, index ``i`` holding the mass of rank ``i + 1``."""
    return np.exp(log_weights(params.a, params.b, params.n) + params.log_norm)


def log_pmf(params, r):
    """Log-mass at rank ``r`` (scalar or array)."""
    rr = _ranks(params, r)
    out = params.b * np.log(params.n + 1 - rr) - params.a * np.log(rr) + params.log_norm
    return float(out) if out.ndim == 0 else out


def pmf(params, r):
    """Mass ``A (n+1-r)**b / r**a`` at rank ``r`` (scalar or array)."""
    out = np.exp(log_pmf(params, r))
    return float(out) if np.ndim(out) == 0 else out


def cdf(params, r):
    """Cumulative mass of ranks ``1..r``.  ``cdf(params, n)`` is 1 up to rounding."""
    rr = _ranks(params, r)
    cum = np.cumsum(probabilities(params))
    out = cum[rr - 1]
    return float(out) if np.ndim(out) == 0 else out


def entropy(params):
    """Shannon entropy in nats.

    Uses ``S = -log A - A * sum_r w_r [b log(n+1-r) - a log r]`` with
    ``w_r = (n+1-r)**b / r**a``, which in log form is
    ``-log A - sum_r f(r) * log w_r``.  The result is clipped to
    ``[0, log n]`` to absorb last-bit rounding.
    """
    lw = log_weights(params.a, params.b, params.n)
    p = np.exp(lw + params.log_norm)
    s = -params.log_norm - float(np.dot(p, lw))
    return min(max(s, 0.0), math.log(params.n))


def _draw(params, count, rng):
    cum = np.cumsum(probabilities(params))
    cum[-1] = 1.0
    u = rng.random(count)
    return np.searchsorted(cum, u, side="right") + 1


def sample(params, count, seed):
    """Draw ``count`` i.i.d. ranks by inverse-CDF lookup.

    Deterministic for a given ``seed``.
    """
    if int(count) != count or count < 1:
        raise InvalidDomainError(f"count must be a positive integer, got {count!r}")
    rng = np.random.default_rng(seed)
    return _draw(params, int(count), rng)
