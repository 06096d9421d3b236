"""Size-weighted maximum-likelihood fitting of DGB exponents.

The log-likelihood of a rank-size series ``{(r_i, x_i)}`` is

    l(a, b) = sum_i x_i * log f_{a,b}(r_i)

which is linear in (a, b) apart from the ``T * log A`` term (``T`` is the
total size).  ``log A`` is minus a log-sum-exp of affine functions, so ``l``
is concave, but along ridges (n = 2 identifies only ``a + b``) it can be
flat; the multi-start below breaks such ties toward the smallest
parameter norm.

The optimizer works on ``l / T``.  That makes gradient tolerances and
step sizes independent of the units of the sizes, so a series and any
positive multiple of it follow the same iterates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .dgb_core import DgbParams, entropy, log_rank_terms
from .exceptions import (
    InvalidDomainError,
    InvalidParameterError,
    NonConvergenceError,
    StratumTooSmallError,
)
from .gof import ks_measure
from .series import RankSizeSeries
from .uncertainty import uncertainty_percentage

__all__ = [
    "RankSizeSeries",
    "FitConfig",
    "FitResult",
    "log_likelihood",
    "grad_log_likelihood",
    "fit_mle",
    "loglik_profile",
]

log = logging.getLogger(__name__)

DEFAULT_RESTART_GRID = tuple(product((-1.0, 0.0, 1.0), repeat=2))

# objective values closer than this (per unit of size) count as ties
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings.

    ``grad_tol`` applies to the infinity norm of the gradient of the
    log-likelihood divided by the total size.
    """

    min_units: int = 5
    grad_tol: float = 1e-8
    max_iters: int = 10000
    param_clamp: float = 10.0
    restart_grid: tuple = DEFAULT_RESTART_GRID
    simplex_tol: float = 1e-10
    up_base: float = math.e

    def __post_init__(self):
        if self.min_units < 1:
            raise InvalidDomainError("min_units must be >= 1")
        if not (self.grad_tol > 0 and self.simplex_tol > 0 and self.param_clamp > 0):
            raise InvalidDomainError("tolerances and the clamp must be strictly positive")
        if self.max_iters < 1:
            raise InvalidDomainError("max_iters must be >= 1")
        if len(self.restart_grid) == 0:
            raise InvalidDomainError("restart_grid is empty")
        object.__setattr__(self, "restart_grid",
                           tuple((float(a), float(b)) for a, b in self.restart_grid))


@dataclass(frozen=True)
class FitResult:
    params: DgbParams
    log_likelihood: float
    ks: float
    entropy: float
    up: float
    converged: bool
    iterations: int
    restarts_used: int
    method: str = "gradient"
    grad_norm: float = field(default=float("nan"))

    @property
    def a(self):
        return self.params.a

    @property
    def b(self):
        return self.params.b

    @property
    def n(self):
        return self.params.n


class _Objective:
    """``l(a, b) / T`` and its gradient for one series."""

    def __init__(self, series):
        self.n = series.n
        self.total = series.total
        self.log_r, self.log_rev = log_rank_terms(self.n)
        w = series.sizes / self.total
        idx = series.ranks - 1
        self.data_log_r = float(np.dot(w, self.log_r[idx]))
        self.data_log_rev = float(np.dot(w, self.log_rev[idx]))
        self.evaluations = 0

    def value(self, theta):
        a, b = theta
        lse = float(logsumexp(b * self.log_rev - a * self.log_r))
        return b * self.data_log_rev - a * self.data_log_r - lse

    def value_and_grad(self, theta):
        self.evaluations += 1
        a, b = theta
        lw = b * self.log_rev - a * self.log_r
        lse = float(logsumexp(lw))
        p = np.exp(lw - lse)
        value = b * self.data_log_rev - a * self.data_log_r - lse
        grad = np.array([float(np.dot(p, self.log_r)) - self.data_log_r,
                         self.data_log_rev - float(np.dot(p, self.log_rev))])
        return value, grad

    def hessian(self, theta):
        """Minus the covariance of ``(-log r, log(N+1-r))`` under the fitted pmf."""
        a, b = theta
        lw = b * self.log_rev - a * self.log_r
        p = np.exp(lw - logsumexp(lw))
        z = np.stack([-self.log_r, self.log_rev])
        zc = z - (z @ p)[:, None]
        return -(zc * p) @ zc.T


def _check_theta(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidParameterError(f"exponents must be finite reals, got a={a!r}, b={b!r}")


def log_likelihood(series, a, b):
    """Weighted log-likelihood ``sum_i x_i log f_{a,b}(r_i)``.

    Sizes may be any non-negative reals (counts or percentage rates); a zero
    size contributes nothing.
    """
    _check_theta(a, b)
    return series.total * _Objective(series).value((float(a), float(b)))


def grad_log_likelihood(series, a, b):
    """Analytic ``(dl/da, dl/db)``.

    ``dl/da = sum_i x_i (E_f[log r] - log r_i)`` and
    ``dl/db = sum_i x_i (log(N+1-r_i) - E_f[log(N+1-r)])``.
    """
    _check_theta(a, b)
    _, g = _Objective(series).value_and_grad((float(a), float(b)))
    return float(series.total * g[0]), float(series.total * g[1])


@dataclass
class _Run:
    theta: np.ndarray
    value: float
    grad: np.ndarray
    converged: bool
    iterations: int
    method: str
    status: str


def _outward(theta, grad, clamp):
    """Mask of coordinates pinned at the box with the gradient pointing out of it."""
    return ((theta >= clamp) & (grad > 0)) | ((theta <= -clamp) & (grad < 0))


def _gradient_ascent(obj, start, cfg):
    clamp = cfg.param_clamp
    theta = np.clip(np.asarray(start, dtype=float), -clamp, clamp)
    f, g = obj.value_and_grad(theta)
    step = 1.0
    for it in range(cfg.max_iters + 1):
        if np.max(np.abs(g)) < cfg.grad_tol:
            return _Run(theta, f, g, True, it, "gradient", "ok")
        d = np.where(_outward(theta, g, clamp), 0.0, g)
        if np.max(np.abs(d)) < cfg.grad_tol:
            return _Run(theta, f, g, False, it, "gradient", "at-bound")
        if it == cfg.max_iters:
            break
        t = step
        while True:
            cand = np.clip(theta + t * d, -clamp, clamp)
            f_new, g_new = obj.value_and_grad(cand)
            moved = cand - theta
            if f_new >= f + 1e-4 * float(np.dot(g, moved)):
                break
            # near the optimum the Armijo increase drowns in rounding; accept
            # a non-decrease that also shrinks the gradient
            noise = 8 * np.finfo(float).eps * max(1.0, abs(f))
            if f_new >= f - noise and np.linalg.norm(g_new) < np.linalg.norm(g):
                break
            t *= 0.5
            if t < 1e-20:
                return _Run(theta, f, g, False, it, "gradient", "line-search")
        s = cand - theta
        y = g - g_new
        sy = float(np.dot(s, y))
        # Barzilai-Borwein trial step for the next line search
        step = float(np.dot(s, s)) / sy if sy > 0 else 2.0 * t
        theta, f, g = cand, f_new, g_new
    return _Run(theta, f, g, False, cfg.max_iters, "gradient", "max-iters")


def _polish(obj, run, cfg, steps=5):
    """Newton refinement of a converged point, kept only while the gradient shrinks."""
    clamp = cfg.param_clamp
    for _ in range(steps):
        h = obj.hessian(run.theta)
        # least squares gives the minimum-norm step on flat ridges
        delta = np.linalg.lstsq(h, -run.grad, rcond=1e-12)[0]
        cand = run.theta + delta
        if np.any(np.abs(cand) > clamp):
            break
        f, g = obj.value_and_grad(cand)
        noise = 8 * np.finfo(float).eps * max(1.0, abs(run.value))
        if f < run.value - noise or np.linalg.norm(g) >= np.linalg.norm(run.grad):
            break
        run = _Run(cand, f, g, True, run.iterations, run.method, run.status)
    return run


def _simplex(obj, start, cfg):
    clamp = cfg.param_clamp
    x0 = np.clip(np.asarray(start, dtype=float), -clamp, clamp)
    init = np.array([x0, x0 + [0.25, 0.0], x0 + [0.0, 0.25]])
    init = np.clip(init, -clamp, clamp)
    if np.linalg.matrix_rank(init[1:] - init[0]) < 2:
        init = np.array([x0, x0 - [0.25, 0.0], x0 - [0.0, 0.25]]).clip(-clamp, clamp)
    res = minimize(lambda th: -obj.value(th), x0, method="Nelder-Mead",
                   bounds=[(-clamp, clamp)] * 2,
                   options={"initial_simplex": init, "xatol": cfg.simplex_tol,
                            "fatol": 1e-15, "maxiter": cfg.max_iters,
                            "maxfev": 4 * cfg.max_iters})
    sim = res.final_simplex[0]
    diameter = max(np.linalg.norm(p - q) for p in sim for q in sim)
    theta = np.asarray(res.x, dtype=float)
    f, g = obj.value_and_grad(theta)
    interior = not np.any(_outward(theta, g, clamp) & (np.abs(g) >= cfg.grad_tol))
    converged = bool(interior and (diameter < cfg.simplex_tol or np.max(np.abs(g)) < cfg.grad_tol))
    status = "ok" if converged else ("at-bound" if not interior else "simplex")
    return _Run(theta, f, g, converged, int(res.nit), "simplex", status)


def _pick_best(runs):
    top = max(r.value for r in runs)
    tied = [r for r in runs if r.value >= top - _TIE_TOL]
    return min(tied, key=lambda r: (float(np.dot(r.theta, r.theta)), r.theta[0], r.theta[1]))


def fit_mle(series, config=None):
    """Fit ``(a, b)`` by maximizing the size-weighted log-likelihood.

    Each start in ``config.restart_grid`` runs projected gradient ascent
    with a backtracking line search inside ``[-clamp, clamp]**2``; a failed
    line search (or exhausted iteration budget) hands over to a bounded
    Nelder-Mead simplex from the last iterate.  Converged points get a few
    Newton steps to settle them well below the stopping tolerance.  The best
    converged terminal point wins.

    Raises
    ------
    StratumTooSmallError
        If the series has fewer than ``config.min_units`` entries.
    NonConvergenceError
        If no start converges; ``err.best`` is the best FitResult found.
    """
    cfg = config or FitConfig()
    if series.n < cfg.min_units:
        raise StratumTooSmallError(series.stratum_id, series.n, cfg.min_units)
    obj = _Objective(series)
    runs = []
    for start in cfg.restart_grid:
        run = _gradient_ascent(obj, start, cfg)
        if not run.converged and run.status in ("line-search", "max-iters"):
            log.debug("%s: gradient ascent from %s stopped (%s), trying simplex",
                      series.stratum_id, start, run.status)
            run = _simplex(obj, run.theta, cfg)
        if run.converged:
            run = _polish(obj, run, cfg)
        runs.append(run)
    good = [r for r in runs if r.converged]
    best = _pick_best(good or runs)
    result = _result(series, best, len(runs), cfg)
    if not good:
        raise NonConvergenceError(
            f"{series.stratum_id}: no start converged (best a={best.theta[0]:.6g}, "
            f"b={best.theta[1]:.6g}, status {best.status})", result)
    return result


def _result(series, run, restarts, cfg):
    params = DgbParams(run.theta[0], run.theta[1], series.n)
    up = uncertainty_percentage(params, cfg.up_base) if series.n >= 2 else float("nan")
    return FitResult(
        params=params,
        log_likelihood=series.total * run.value,
        ks=ks_measure(series, params),
        entropy=entropy(params),
        up=up,
        converged=run.converged,
        iterations=run.iterations,
        restarts_used=restarts,
        method=run.method,
        grad_norm=float(np.max(np.abs(run.grad))),
    )


def loglik_profile(series, p0, p1, points=11):
    """Log-likelihood at ``points`` evenly spaced parameter pairs from p0 to p1."""
    obj = _Objective(series)
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    return np.array([series.total * obj.value(p0 + t * (p1 - p0))
                     for t in np.linspace(0.0, 1.0, points)])
