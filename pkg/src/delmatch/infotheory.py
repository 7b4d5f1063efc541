"""Entropies, weak typicality, achievable matching rates, and supersequence
counts for the column-deletion setting.

All logarithms are base 2; rates are bits per column.  Everything here is a
pure function, safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, comb, log2

import numpy as np

from .model import Distribution


def entropy(dist: Distribution) -> float:
    """Shannon entropy in bits; zero-probability symbols contribute nothing."""
    return float(sum(-p * log2(p) for p in dist.probabilities if p > 0.0))


def binary_entropy(x: float) -> float:
    """H_b(x) in bits, with H_b(0) = H_b(1) = 0 exactly."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("argument must be in [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * log2(x) - (1.0 - x) * log2(1.0 - x)


@dataclass(frozen=True)
class RateParams:
    """Inputs to the achievable-rate formula."""

    dist: Distribution
    delta: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must be in [0, 1)")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")

    @property
    def regime_ok(self) -> bool:
        """True when delta < 1 - 1/q, the regime the rate guarantee assumes.

        The formula is still evaluated outside this regime (useful for full
        curve sweeps); this flag marks where the guarantee actually applies.
        """
        return self.delta < 1.0 - 1.0 / self.dist.alphabet_size


def achievable_rate(params: RateParams) -> float:
    """Guaranteed-achievable database growth rate, bits per column.

    Positive part of
        (1 - a*d) * (H(X) - H_b((1-d)/(1-a*d))) - (1-a) * d * log2(q-1)
    with d the deletion probability and a the detection probability.  At
    a=1 this reduces exactly to (1-d) H(X); at a=0 to
    H(X) - H_b(d) - d log2(q-1), each taken at their positive part.
    """
    d, a = params.delta, params.alpha
    h = entropy(params.dist)
    q = params.dist.alphabet_size
    survivor = 1.0 - a * d
    inner = survivor * (h - binary_entropy((1.0 - d) / survivor))
    inner -= (1.0 - a) * d * log2(q - 1)
    return max(0.0, inner)


@dataclass(frozen=True)
class TypicalityParams:
    """Slack and expected length for a weak-typicality test."""

    epsilon: float
    length: int

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")
        if self.length < 0:
            raise ValueError("length must be >= 0")


def is_typical(sequence, dist: Distribution, params: TypicalityParams) -> bool:
    """Weak typicality: |-(1/L) log2 p(sequence) - H(X)| <= epsilon.

    Probabilities accumulate in log space, so long sequences cannot
    underflow.  A zero-probability symbol makes the sequence atypical
    (its -log2 p is +inf) rather than raising.  The empty sequence is
    typical by convention.
    """
    seq = np.asarray(sequence)
    if seq.ndim != 1 or seq.shape[0] != params.length:
        raise ValueError(f"sequence length {seq.shape} != declared {params.length}")
    if params.length == 0:
        return True
    if seq.size and int(seq.max()) >= dist.alphabet_size:
        raise ValueError("symbol index exceeds alphabet size")
    score = float(dist.neg_log2()[seq].mean())
    return abs(score - entropy(dist)) <= params.epsilon


def supersequence_count_exact(n: int, k: int, q: int) -> int:
    """Exact number of q-ary length-n strings containing a fixed length-k
    string as a (possibly non-contiguous) subsequence.

    The count is independent of which length-k string is fixed and equals
    sum_{i=k}^{n} C(n, i) (q-1)^(n-i).  Returned as an exact unbounded int.
    """
    if q < 2:
        raise ValueError("alphabet size must be >= 2")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return sum(comb(n, i) * (q - 1) ** (n - i) for i in range(k, n + 1))


def supersequence_count_bound(n: int, k: int, q: int) -> float:
    """log2 of the analytic upper bound n * 2^(n H_b(k/n)) * (q-1)^(n-k).

    Only valid for k >= n/q; outside that regime a ValueError is raised.
    """
    if q < 2:
        raise ValueError("alphabet size must be >= 2")
    if not 1 <= n or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    if k * q < n:
        raise ValueError("bound requires k >= n/q")
    return log2(n) + n * binary_entropy(k / n) + (n - k) * log2(q - 1)


def min_seed_batch_size(n: int, delta: float, alpha_target: float,
                        entropy_bits: float) -> int:
    """Smallest batch size B with B >= log2(n (1-delta) / (1-alpha_target)) / H.

    Guarantees a deletion-detection probability of at least alpha_target for
    the certainty detector.  alpha_target = 1 needs an unbounded batch and is
    rejected.
    """
    if not 0.0 <= alpha_target < 1.0:
        raise ValueError("alpha_target = 1 is unbounded; need alpha_target < 1")
    if entropy_bits <= 0.0:
        raise ValueError("entropy must be positive")
    if n < 1 or not 0.0 <= delta < 1.0:
        raise ValueError("invalid n or delta")
    need = log2(n * (1.0 - delta) / (1.0 - alpha_target)) / entropy_bits
    # snap float noise so exact-integer thresholds stay exact
    nearest = round(need)
    if abs(need - nearest) < 1e-9:
        need = nearest
    return max(0, ceil(need))


def detection_probability_bound(n: int, B: int, delta: float,
                                entropy_bits: float, epsilon: float) -> float:
    """Analytic lower bound 1 - eps - n 2^(-B(H-eps)) (1-delta) on the
    probability that a truly deleted column is flagged Deleted.

    May be negative (a trivial bound); reported as-is.
    """
    if B < 1:
        raise ValueError("batch size must be >= 1")
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    return 1.0 - epsilon - n * 2.0 ** (-B * (entropy_bits - epsilon)) * (1.0 - delta)


def detection_probability_bound_clamped(n: int, B: int, delta: float,
                                        entropy_bits: float, epsilon: float) -> float:
    """detection_probability_bound clipped to [0, 1]."""
    return min(1.0, max(0.0, detection_probability_bound(n, B, delta, entropy_bits, epsilon)))
