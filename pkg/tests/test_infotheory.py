from itertools import product
from math import comb, log2

import numpy as np
import pytest

from delmatch import (Distribution, entropy, binary_entropy, RateParams,
                      achievable_rate, TypicalityParams, is_typical,
                      supersequence_count_exact, supersequence_count_bound,
                      min_seed_batch_size, detection_probability_bound,
                      detection_probability_bound_clamped)


# -- entropy ---------------------------------------------------------------

def test_entropy_uniform_binary():
    assert entropy(Distribution.bernoulli(0.5)) == 1.0


def test_entropy_point_mass():
    assert entropy(Distribution((1.0, 0.0))) == 0.0


def test_entropy_bern02():
    assert entropy(Distribution.bernoulli(0.2)) == pytest.approx(0.721928, abs=1e-6)


def test_entropy_bounds():
    for q in (2, 3, 5):
        for seed in range(5):
            p = np.random.default_rng(seed).dirichlet(np.ones(q))
            p = p / p.sum()
            h = entropy(Distribution(tuple(p)))
            assert 0.0 <= h <= log2(q) + 1e-12


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.4) == pytest.approx(0.970951, abs=1e-6)


def test_binary_entropy_symmetric():
    for x in np.linspace(0.0, 1.0, 21):
        assert binary_entropy(x) == pytest.approx(binary_entropy(1.0 - x), abs=1e-12)


def test_binary_entropy_domain():
    with pytest.raises(ValueError):
        binary_entropy(-0.1)
    with pytest.raises(ValueError):
        binary_entropy(1.1)


# -- achievable rate -------------------------------------------------------

def _rate_no_side_info(dist, delta):
    q = dist.alphabet_size
    return max(0.0, entropy(dist) - binary_entropy(delta) - delta * log2(q - 1))


def _rate_full_side_info(dist, delta):
    return (1.0 - delta) * entropy(dist)


def test_rate_full_info_bern_half():
    assert achievable_rate(RateParams(Distribution.bernoulli(0.5), 0.4, 1.0)) == 0.6


def test_rate_no_info_bern_half():
    r = achievable_rate(RateParams(Distribution.bernoulli(0.5), 0.4, 0.0))
    assert r == pytest.approx(1.0 - binary_entropy(0.4), abs=1e-12)
    assert r == pytest.approx(0.029049, abs=1e-6)


def test_rate_half_info_bern_half():
    r = achievable_rate(RateParams(Distribution.bernoulli(0.5), 0.4, 0.5))
    assert r == pytest.approx(0.8 * (1.0 - binary_entropy(0.75)), abs=1e-12)
    assert r == pytest.approx(0.150978, abs=1e-6)


def test_rate_positive_part_boundary():
    # uniform q-ary at delta = 1 - 1/q and no side info sits exactly at zero
    for q in (2, 3, 4, 6):
        dist = Distribution.uniform(q)
        r = achievable_rate(RateParams(dist, 1.0 - 1.0 / q, 0.0))
        assert 0.0 <= r <= 1e-12


def test_rate_reduces_to_endpoint_formulas():
    dists = [Distribution.bernoulli(p) for p in (0.1, 0.25, 0.5)]
    dists += [Distribution.uniform(q) for q in (2, 3, 4)]
    dists += [Distribution((0.2, 0.3, 0.5))]
    for dist, delta in product(dists, (0.0, 0.1, 0.3, 0.45)):
        assert achievable_rate(RateParams(dist, delta, 0.0)) == pytest.approx(
            _rate_no_side_info(dist, delta), abs=1e-12)
        assert achievable_rate(RateParams(dist, delta, 1.0)) == pytest.approx(
            _rate_full_side_info(dist, delta), abs=1e-12)


def test_rate_nondecreasing_in_alpha():
    dists = [Distribution.bernoulli(0.3), Distribution.uniform(3),
             Distribution((0.5, 0.3, 0.2))]
    alphas = np.linspace(0.0, 1.0, 11)
    for dist in dists:
        for delta in (0.1, 0.3, 0.5):
            if delta >= 1.0 - 1.0 / dist.alphabet_size:
                continue
            rates = [achievable_rate(RateParams(dist, delta, a)) for a in alphas]
            assert all(b >= a - 1e-12 for a, b in zip(rates, rates[1:]))


def test_rate_regime_flag():
    assert not RateParams(Distribution.bernoulli(0.5), 0.6, 0.0).regime_ok
    assert RateParams(Distribution.bernoulli(0.5), 0.4, 0.0).regime_ok
    # out of regime still evaluates
    achievable_rate(RateParams(Distribution.bernoulli(0.5), 0.9, 0.0))


# -- typicality ------------------------------------------------------------

def test_uniform_sequences_always_typical():
    dist = Distribution.bernoulli(0.5)
    for seq in ([0, 0, 0], [1, 0, 1], [1, 1, 1, 1, 1, 1]):
        assert is_typical(seq, dist, TypicalityParams(0.0, len(seq)))


def test_exact_empirical_match_is_typical():
    dist = Distribution((0.8, 0.2))
    assert is_typical([0, 0, 0, 0, 1], dist, TypicalityParams(0.1, 5))


def test_skewed_sequence_atypical():
    dist = Distribution((0.8, 0.2))
    # score 0.321928 differs from H = 0.721928 by 0.4 > 0.1
    assert not is_typical([0, 0, 0, 0, 0], dist, TypicalityParams(0.1, 5))


def test_zero_probability_symbol_atypical():
    dist = Distribution((0.5, 0.5, 0.0))
    assert not is_typical([0, 2], dist, TypicalityParams(10.0, 2))


def test_typicality_length_checked():
    dist = Distribution.bernoulli(0.5)
    with pytest.raises(ValueError):
        is_typical([0, 1], dist, TypicalityParams(0.1, 3))


def test_empty_sequence_typical():
    assert is_typical([], Distribution((0.8, 0.2)), TypicalityParams(0.0, 0))


def test_typicality_matches_direct_inequality():
    rng = np.random.default_rng(7)
    dist = Distribution((0.6, 0.3, 0.1))
    h = entropy(dist)
    for _ in range(100):
        length = int(rng.integers(1, 12))
        seq = rng.integers(0, 3, size=length)
        eps = float(rng.uniform(0.0, 1.0))
        score = -sum(log2(dist.probabilities[int(s)]) for s in seq) / length
        if abs(abs(score - h) - eps) < 1e-9:
            continue  # boundary case: float evaluation order may disagree
        assert is_typical(seq, dist, TypicalityParams(eps, length)) == \
            (abs(score - h) <= eps)


# -- supersequence counts --------------------------------------------------

def _brute_force_supersequences(n, k, q, fixed):
    count = 0
    for code in range(q ** n):
        seq = []
        c = code
        for _ in range(n):
            seq.append(c % q)
            c //= q
        it = iter(seq)
        if all(s in it for s in fixed):
            count += 1
    return count


def test_supersequence_small_case():
    assert supersequence_count_exact(3, 2, 2) == 4
    assert supersequence_count_exact(3, 2, 2) == _brute_force_supersequences(
        3, 2, 2, [0, 1])


def test_supersequence_trivials():
    for n, q in product((1, 3, 6), (2, 3)):
        assert supersequence_count_exact(n, n, q) == 1
        assert supersequence_count_exact(n, 0, q) == q ** n


def test_supersequence_string_independence():
    rng = np.random.default_rng(11)
    for _ in range(30):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 8))
        k = int(rng.integers(0, n + 1))
        counts = {_brute_force_supersequences(n, k, q, rng.integers(0, q, size=k))
                  for _ in range(3)}
        assert counts == {supersequence_count_exact(n, k, q)}


def test_supersequence_argument_errors():
    with pytest.raises(ValueError):
        supersequence_count_exact(3, 4, 2)
    with pytest.raises(ValueError):
        supersequence_count_exact(3, 2, 1)


def test_bound_small_case():
    bound = supersequence_count_bound(3, 2, 2)
    assert bound == pytest.approx(log2(3) + 3 * binary_entropy(2 / 3), abs=1e-12)
    assert bound >= log2(4)


def test_bound_at_k_equals_n():
    for n in (1, 2, 5, 17):
        assert supersequence_count_bound(n, n, 2) == pytest.approx(log2(n), abs=1e-12)
        assert log2(supersequence_count_exact(n, n, 2)) <= supersequence_count_bound(n, n, 2)


def test_bound_regime_error():
    with pytest.raises(ValueError):
        supersequence_count_bound(10, 2, 3)  # k < n/q


def test_bound_dominates_exact_in_regime():
    for q in (2, 3):
        for n in range(1, 13):
            for k in range(1, n + 1):
                if k * q < n:
                    continue
                exact = supersequence_count_exact(n, k, q)
                assert log2(exact) <= supersequence_count_bound(n, k, q) + 1e-12


# -- batch size and detection bound ----------------------------------------

def test_min_seed_batch_size_values():
    assert min_seed_batch_size(1024, 0.5, 0.5, 1.0) == 10
    assert min_seed_batch_size(8, 0.0, 0.0, 1.0) == 3
    assert min_seed_batch_size(100, 0.5, 0.9, 0.721928) == 13


def test_min_seed_batch_size_unbounded():
    with pytest.raises(ValueError, match="unbounded"):
        min_seed_batch_size(100, 0.5, 1.0, 1.0)


def test_detection_bound_value():
    assert detection_probability_bound(100, 20, 0.5, 1.0, 0.05) == pytest.approx(
        0.949905, abs=1e-6)


def test_detection_bound_large_batch_limit():
    val = detection_probability_bound(100, 400, 0.5, 1.0, 0.05)
    assert val == pytest.approx(0.95, abs=1e-9)


def test_detection_bound_degrades_with_n():
    # n = 4 * 2^B with H = 1, eps = 0: exactly 1 - 4(1 - delta)
    for B, delta in ((10, 0.5), (16, 0.25)):
        n = 4 * 2 ** B
        assert detection_probability_bound(n, B, delta, 1.0, 0.0) == pytest.approx(
            1.0 - 4.0 * (1.0 - delta), abs=1e-12)


def test_detection_bound_clamped():
    raw = detection_probability_bound(256, 2, 0.25, 1.0, 0.05)
    assert raw < 0.0
    assert detection_probability_bound_clamped(256, 2, 0.25, 1.0, 0.05) == 0.0
