import itertools
import math

import numpy as np
import pytest

from dgbrank.analysis import correlate_fits, is_significant, pearson, spearman, t_statistic
from dgbrank.estimation import fit_mle
from dgbrank.exceptions import DimensionError, InsufficientDataError
from dgbrank.synth import exact_series


def mid_ranks(v):
    """Brute-force average ranks: 1 + (# smaller) + (# equal - 1) / 2."""
    return [1 + sum(u < x for u in v) + (sum(u == x for u in v) - 1) / 2 for x in v]


def plain_pearson(x, y):
    mx, my = sum(x) / len(x), sum(y) / len(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def test_pearson_hand_case():
    assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-15)


def test_spearman_with_ties():
    assert spearman([1, 1, 2], [3, 5, 4]) == pytest.approx(0.0, abs=1e-15)
    assert mid_ranks([1, 1, 2]) == [1.5, 1.5, 3]


@pytest.mark.parametrize("seed", range(5))
def test_spearman_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 5, 12).tolist()
    y = rng.integers(0, 5, 12).tolist()
    assert spearman(x, y) == pytest.approx(plain_pearson(mid_ranks(x), mid_ranks(y)), abs=1e-12)


def test_monotone_gives_plus_minus_one():
    x = np.linspace(0.1, 5, 20)
    assert pearson(x, 3 * x + 1) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    assert spearman(x, np.exp(x)) == 1.0
    assert spearman(x, -x ** 3) == -1.0


def test_spearman_invariant_to_monotone_transform():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=15), rng.normal(size=15)
    assert spearman(x, y) == pytest.approx(spearman(np.exp(x), y ** 3 + 2 * y), abs=1e-12)


def test_pair_order_independent():
    rng = np.random.default_rng(2)
    x, y = rng.normal(size=10), rng.normal(size=10)
    perm = rng.permutation(10)
    assert pearson(x, y) == pytest.approx(pearson(x[perm], y[perm]), abs=1e-14)
    assert spearman(x, y) == pytest.approx(spearman(x[perm], y[perm]), abs=1e-14)


def test_errors():
    with pytest.raises(DimensionError):
        pearson([1, 2, 3], [1, 2])
    with pytest.raises(InsufficientDataError):
        pearson([1, 2], [2, 1])
    with pytest.raises(InsufficientDataError):
        spearman([1, 1, 1], [1, 2, 3])


def test_t_statistic_and_critical_value():
    assert t_statistic(0.5, 6) == pytest.approx(0.5 * math.sqrt(4 / 0.75))
    assert t_statistic(1.0, 5) == math.inf
    # two-sided 5% critical t for 24 degrees of freedom is 2.0639
    r_crit = 2.0639 / math.sqrt(24 + 2.0639 ** 2)
    assert is_significant(r_crit + 1e-3, 26) and not is_significant(r_crit - 1e-3, 26)


def test_shuffled_vectors_rarely_significant():
    rng = np.random.default_rng(0)
    x = rng.normal(size=26)
    hits = sum(is_significant(pearson(x, rng.permutation(x)), 26) for _ in range(1000))
    assert hits <= 100


def _fits(values):
    out = {}
    for (stratum, ind), (a, b) in values.items():
        out[stratum, ind] = fit_mle(exact_series(a, b, 12, 1000.0, stratum_id=stratum))
    return out


def test_correlate_fits_structure():
    rng = np.random.default_rng(5)
    values = {}
    for s in "ABCDEF":
        a, b = rng.uniform(0, 1, 2)
        values[s, "lr"] = (a, b)
        values[s, "wpr"] = (a * 2, b + 0.1)
    values["G", "lr"] = (0.1, 0.1)          # missing its wpr fit
    rep = correlate_fits(_fits(values), 2011)
    assert rep.n_strata == 6 and "G" not in rep.strata
    assert len(rep.rows) == 6
    a_row = next(r for r in rep.rows if r.left == "lr:a" and r.statistic == "pearson")
    assert a_row.coefficient == pytest.approx(1.0, abs=1e-5)
    assert a_row.significant_95 and a_row.slope == pytest.approx(2.0, abs=1e-4)


def test_correlate_needs_three_strata():
    values = {(s, ind): (0.3, 0.3) for s, ind in itertools.product("AB", ("lr", "wpr"))}
    with pytest.raises(InsufficientDataError):
        correlate_fits(_fits(values), 2011)


def test_correlate_constant_column_is_nan():
    values = {}
    for i, s in enumerate("ABCD"):
        values[s, "lr"] = (0.5, 0.1 * i)
        values[s, "wpr"] = (0.2 * i, 0.1 * i)
    rep = correlate_fits(_fits(values), 2011)
    row = next(r for r in rep.rows if r.left == "lr:a")
    assert math.isnan(row.coefficient) and not row.significant_95
