import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgbrank.dgb_core import (
    DgbParams,
    cdf,
    entropy,
    log_normalizer,
    log_pmf,
    pmf,
    probabilities,
    sample,
)
from dgbrank.exceptions import InvalidDomainError, InvalidParameterError, InvalidRankError


def direct_masses(a, b, n):
    """Plain-float summation of (n+1-r)**b / r**a, no log-space tricks."""
    w = [(n + 1 - r) ** b / r ** a for r in range(1, n + 1)]
    total = math.fsum(w)
    return [x / total for x in w]


def direct_entropy(a, b, n):
    return -math.fsum(p * math.log(p) for p in direct_masses(a, b, n))


exponents = st.floats(-5, 5, allow_nan=False)


class TestLogNormalizer:
    def test_uniform(self):
        assert log_normalizer(0, 0, 10) == pytest.approx(math.log(1 / 10), rel=1e-15)

    def test_two_ranks(self):
        assert log_normalizer(1, 0, 2) == pytest.approx(math.log(2 / 3), rel=1e-14)

    def test_published_pair_sums_to_one(self):
        p = DgbParams(0.252, 0.872, 640)
        assert math.isfinite(p.log_norm)
        assert math.fsum(probabilities(p)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(50, 50), (-50, -50), (50, -50), (-50, 50)])
    def test_extreme_exponents_do_not_overflow(self, a, b):
        p = DgbParams(a, b, 100_000)
        probs = probabilities(p)
        assert math.isfinite(p.log_norm)
        assert np.all(np.isfinite(probs))
        assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(math.nan, 0), (0, math.inf), (-math.inf, 1)])
    def test_non_finite(self, a, b):
        with pytest.raises(InvalidParameterError):
            log_normalizer(a, b, 5)

    @pytest.mark.parametrize("n", [0, -3, 2.5])
    def test_bad_n(self, n):
        with pytest.raises(InvalidDomainError):
            log_normalizer(0, 0, n)


class TestPmf:
    def test_uniform(self):
        assert pmf(DgbParams(0, 0, 5), 3) == pytest.approx(0.2, rel=1e-15)

    def test_two_ranks(self):
        assert pmf(DgbParams(1, 0, 2), 2) == pytest.approx(1 / 3, rel=1e-14)

    def test_linear_weights(self):
        assert pmf(DgbParams(0, 1, 3), 1) == pytest.approx(0.5, rel=1e-14)

    def test_vector_argument(self):
        p = DgbParams(0.4, 0.2, 6)
        np.testing.assert_allclose(pmf(p, np.arange(1, 7)), probabilities(p))
        np.testing.assert_allclose(np.exp(log_pmf(p, [2, 5])), probabilities(p)[[1, 4]])

    @pytest.mark.parametrize("r", [0, 6, -1, 2.5])
    def test_rank_out_of_range(self, r):
        with pytest.raises(InvalidRankError):
            pmf(DgbParams(0, 0, 5), r)

    @pytest.mark.parametrize("a,b,n", [(0.5, 0.5, 7), (-1.2, 0.3, 20), (2.0, -0.7, 50)])
    def test_matches_direct_summation(self, a, b, n):
        np.testing.assert_allclose(probabilities(DgbParams(a, b, n)),
                                   direct_masses(a, b, n), rtol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(a=exponents, b=exponents, n=st.integers(1, 300))
    def test_masses_sum_to_one_and_positive(self, a, b, n):
        probs = probabilities(DgbParams(a, b, n))
        assert math.fsum(probs) == pytest.approx(1.0, abs=1e-12)
        assert np.all(probs > 0)

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("n", [5, 50])
    def test_zero_b_is_pure_power_law(self, a, n):
        r = np.arange(1, n + 1)
        zipf = r ** -a / np.sum(r ** -a)
        np.testing.assert_allclose(probabilities(DgbParams(a, 0, n)), zipf, rtol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(a=exponents, b=exponents, n=st.integers(1, 200))
    def test_reversal_maps_to_negated_swap(self, a, b, n):
        # f_{a,b}(r) = f_{-b,-a}(n+1-r): r <-> n+1-r swaps and negates the exponents
        fwd = probabilities(DgbParams(a, b, n))
        back = probabilities(DgbParams(-b, -a, n))[::-1]
        np.testing.assert_allclose(fwd, back, rtol=1e-11)


class TestCdf:
    def test_uniform_half(self):
        assert cdf(DgbParams(0, 0, 4), 2) == pytest.approx(0.5, rel=1e-15)

    def test_linear_weights(self):
        assert cdf(DgbParams(0, 1, 3), 2) == pytest.approx(5 / 6, rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(a=exponents, b=exponents, n=st.integers(1, 200))
    def test_total_mass_and_monotone(self, a, b, n):
        p = DgbParams(a, b, n)
        c = cdf(p, np.arange(1, n + 1))
        assert c[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(c) >= 0)


class TestEntropy:
    @pytest.mark.parametrize("n", [1, 2, 10, 640])
    def test_uniform_is_log_n(self, n):
        assert entropy(DgbParams(0, 0, n)) == math.log(n)

    def test_two_ranks(self):
        expected = -(2 / 3) * math.log(2 / 3) - (1 / 3) * math.log(1 / 3)
        assert entropy(DgbParams(1, 0, 2)) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("a", [-2, -0.5, 0, 0.5, 2])
    @pytest.mark.parametrize("b", [-2, -0.5, 0, 0.5, 2])
    @pytest.mark.parametrize("n", [2, 10, 640])
    def test_matches_direct_summation(self, a, b, n):
        assert entropy(DgbParams(a, b, n)) == pytest.approx(direct_entropy(a, b, n), rel=1e-10)

    def test_two_ranks_uniform_along_antidiagonal(self):
        # n=2 only sees a + b, so (t, -t) is uniform for every t
        assert entropy(DgbParams(0.7, -0.7, 2)) == pytest.approx(math.log(2), rel=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(a=exponents, b=exponents, n=st.integers(3, 200))
    def test_below_log_n_unless_uniform(self, a, b, n):
        s = entropy(DgbParams(a, b, n))
        assert 0 <= s <= math.log(n)
        if (a, b) != (0, 0) and abs(a) + abs(b) > 1e-3:
            assert s < math.log(n)

    @settings(max_examples=40, deadline=None)
    @given(a=exponents, b=exponents, n=st.integers(1, 200))
    def test_invariant_under_negated_swap(self, a, b, n):
        assert entropy(DgbParams(a, b, n)) == pytest.approx(entropy(DgbParams(-b, -a, n)),
                                                            rel=1e-10, abs=1e-12)

    def test_plain_swap_is_not_a_symmetry(self):
        # (a, b) -> (b, a) changes the distribution; the hand case n=3 shows it
        assert direct_entropy(1, 0, 3) == pytest.approx(0.994924, abs=1e-6)
        assert direct_entropy(0, 1, 3) == pytest.approx(1.011404, abs=1e-6)
        assert entropy(DgbParams(1, 0, 3)) != pytest.approx(entropy(DgbParams(0, 1, 3)))


class TestSample:
    def test_degenerate_support(self):
        assert sample(DgbParams(0, 0, 1), 5, seed=7).tolist() == [1, 1, 1, 1, 1]

    def test_uniform_frequencies(self):
        draws = sample(DgbParams(0, 0, 4), 10**6, seed=1)
        freq = np.bincount(draws, minlength=5)[1:] / len(draws)
        np.testing.assert_allclose(freq, 0.25, atol=0.005)

    def test_rank_one_frequency(self):
        p = DgbParams(3, 0, 100)
        draws = sample(p, 10**6, seed=1)
        assert np.mean(draws == 1) == pytest.approx(pmf(p, 1), abs=0.005)

    def test_deterministic(self):
        p = DgbParams(0.3, 0.6, 40)
        assert np.array_equal(sample(p, 1000, seed=5), sample(p, 1000, seed=5))
        assert not np.array_equal(sample(p, 1000, seed=5), sample(p, 1000, seed=6))

    def test_range(self):
        draws = sample(DgbParams(-1, 2, 9), 10_000, seed=0)
        assert draws.min() >= 1 and draws.max() <= 9

    def test_bad_count(self):
        with pytest.raises(InvalidDomainError):
            sample(DgbParams(0, 0, 3), 0, seed=1)


def test_params_are_immutable():
    p = DgbParams(0.1, 0.2, 5)
    with pytest.raises(AttributeError):
        p.a = 3.0
    assert p == DgbParams(0.1, 0.2, 5)
