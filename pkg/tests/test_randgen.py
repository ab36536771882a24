import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize, stats

from metapres.intlinalg import rank
from metapres.presentation import is_full_rank, relation_matrix
from metapres.randgen import (
    ExperimentConfig,
    estimate_full_rank_probability,
    exact_full_rank_probability,
    exponent_batch,
    exponent_distribution,
    full_rank_batch,
    sample_presentation,
    sample_word,
    trial_codes,
    trial_presentation,
    wilson_interval,
)
from metapres.words import exponent_vector


def enumerate_probability(n, m, ell):
    """Brute force over every tuple of raw letter sequences; no DP, no strata."""
    seqs = list(itertools.product(range(2 * n), repeat=ell))
    vecs = Counter()
    for s in seqs:
        v = [0] * n
        for k in s:
            v[k % n] += 1 if k < n else -1
        vecs[tuple(v)] += 1
    r = min(n, m)
    good = 0
    for combo in itertools.product(vecs.items(), repeat=m):
        if rank([v for v, _ in combo]) == r:
            w = 1
            for _, c in combo:
                w *= c
            good += w
    return Fraction(good, len(seqs) ** m)


def test_sample_word_edge_cases():
    rng = np.random.default_rng(0)
    assert sample_word(3, 0, rng).is_identity()
    for _ in range(20):
        assert len(sample_word(1, 1, rng)) == 1


def test_sample_word_chi_square():
    # n = 2, ell = 2: 16 equally likely raw sequences; 4 of them reduce to 1
    rng = np.random.default_rng(1)
    counts = Counter(sample_word(2, 2, rng).letters for _ in range(100_000))
    expected = {(): 4}
    for a, b in itertools.product([1, -1, 2, -2], repeat=2):
        if a != -b:
            expected[(a, b)] = 1
    assert set(counts) == set(expected)
    keys = sorted(expected)
    observed = [counts[k] for k in keys]
    exp = [100_000 * expected[k] / 16 for k in keys]
    assert stats.chisquare(observed, exp).pvalue > 1e-4


def test_sample_presentation_shape_and_determinism():
    p = sample_presentation(3, 0, 5, np.random.default_rng(2))
    assert p.m == 0 and p.n == 3
    a = sample_presentation(2, 3, 9, np.random.default_rng(5))
    b = sample_presentation(2, 3, 9, np.random.default_rng(5))
    assert a == b and a.m == 3


def test_exponent_distribution_small():
    assert exponent_distribution(1, 2) == {(-2,): 1, (0,): 2, (2,): 1}
    d = exponent_distribution(2, 3)
    assert sum(d.values()) == 4**3
    assert all(sum(v) % 2 == 1 for v in d)


@pytest.mark.parametrize(
    "n, m, ell",
    [(n, m, ell) for n in (1, 2) for m in (1, 2) for ell in range(0, 5)]
    + [(3, 1, 2), (3, 2, 2), (3, 3, 1), (3, 3, 2), (2, 3, 2), (1, 3, 3)],
)
def test_exact_oracle_against_enumeration(n, m, ell):
    assert exact_full_rank_probability(n, m, ell) == enumerate_probability(n, m, ell)


def test_exact_known_values():
    assert exact_full_rank_probability(1, 1, 2) == Fraction(1, 2)
    assert exact_full_rank_probability(2, 2, 2) == Fraction(13, 32)
    assert exact_full_rank_probability(1, 1, 7) == 1
    assert exact_full_rank_probability(2, 0, 5) == 1


def test_exact_guards():
    with pytest.raises(ValueError):
        exact_full_rank_probability(4, 2, 3)
    with pytest.raises(ValueError):
        exact_full_rank_probability(2, 2, 11)
    assert 0 < exact_full_rank_probability(4, 2, 3, max_n=4) < 1


def test_exact_one_generator_odd_length():
    # an odd exponent sum is never zero, so a single column is always nonzero
    for ell in (1, 3, 5, 7):
        assert exact_full_rank_probability(1, 2, ell) == 1


@settings(max_examples=30)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 12), st.integers(0, 2**32))
def test_full_rank_batch_matches_scalar_path(n, m, ell, seed):
    codes = trial_codes(n, m, ell, seed, 0, 40)
    flags = full_rank_batch(exponent_batch(codes, n))
    for i in range(40):
        p = trial_presentation(n, m, ell, seed, i)
        assert relation_matrix(p).tolist() == exponent_batch(codes[i : i + 1], n)[0].tolist()
        assert bool(flags[i]) == is_full_rank(p)


def test_full_rank_batch_large_rank_fallback():
    E = np.zeros((2, 5, 5), dtype=np.int64)
    E[0] = np.eye(5, dtype=np.int64)
    E[1] = np.eye(5, dtype=np.int64)
    E[1, 4, 4] = 0
    assert full_rank_batch(E).tolist() == [True, False]


@settings(max_examples=30)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 20), st.integers(0, 200), st.integers(1, 50))
def test_trial_codes_chunk_invariant(n, m, ell, a, k):
    whole = trial_codes(n, m, ell, 9, 0, a + k)
    assert np.array_equal(whole[a:], trial_codes(n, m, ell, 9, a, a + k))


def test_chunk_size_does_not_change_estimate():
    base = ExperimentConfig(2, 2, (5, 9), 3000, master_seed=4)
    a = estimate_full_rank_probability(base)
    b = estimate_full_rank_probability(ExperimentConfig(2, 2, (5, 9), 3000, master_seed=4, chunk_size=7))
    c = estimate_full_rank_probability(base, workers=4)
    assert a.rows == b.rows == c.rows
    assert a.to_csv() == c.to_csv()


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(0, 1, (3,), 10)
    with pytest.raises(ValueError):
        ExperimentConfig(1, 1, (), 10)
    with pytest.raises(ValueError):
        ExperimentConfig(1, 1, (3,), 10, confidence=1.0)


@given(st.integers(1, 5000), st.data())
def test_wilson_interval_properties(trials, data):
    k = data.draw(st.integers(0, trials))
    lo, hi = wilson_interval(k, trials)
    assert 0 <= lo <= k / trials <= hi <= 1
    lo95, hi95 = wilson_interval(k, trials, 0.95)
    assert lo <= lo95 and hi95 <= hi
    if k == trials:
        assert hi == 1.0
    if k == 0:
        assert lo == 0.0


@pytest.mark.parametrize("k, trials", [(50, 100), (3, 40), (997, 1000)])
def test_wilson_matches_score_equation(k, trials):
    # Endpoints are the roots p of (k/T - p)^2 = z^2 p (1 - p) / T.
    z = stats.norm.ppf(0.995)
    p_hat = k / trials

    def score(p):
        return (p_hat - p) ** 2 - z * z * p * (1 - p) / trials

    lo, hi = wilson_interval(k, trials)
    assert lo == pytest.approx(optimize.brentq(score, 1e-12, p_hat), abs=1e-9)
    assert hi == pytest.approx(optimize.brentq(score, p_hat, 1 - 1e-12), abs=1e-9)
    if (k, trials) == (50, 100):
        assert (round(lo, 5), round(hi, 5)) == (0.37528, 0.62472)


@settings(max_examples=50)
@given(st.integers(1, 4), st.integers(0, 30), st.integers(0, 2**32))
def test_exponent_sum_parity(n, ell, seed):
    w = sample_word(n, ell, np.random.default_rng(seed))
    assert sum(exponent_vector(w, n)) % 2 == ell % 2


def test_one_generator_odd_length_always_full_rank():
    r = estimate_full_rank_probability(ExperimentConfig(1, 1, (1, 3, 9, 21), 2000, master_seed=3))
    assert all(row.successes == row.trials for row in r.rows)


def test_monte_carlo_calibration():
    # Each (config, seed) should fall outside the 99% interval about 1% of the time.
    misses = total = 0
    for n, m, ell in [(1, 1, 4), (2, 1, 2), (2, 2, 3)]:
        p = float(exact_full_rank_probability(n, m, ell))
        for seed in range(40):
            row = estimate_full_rank_probability(ExperimentConfig(n, m, (ell,), 2000, master_seed=1000 + seed)).rows[0]
            total += 1
            misses += not (row.ci_low <= p <= row.ci_high)
    assert misses <= 5, f"{misses}/{total} outside their 99% intervals"
