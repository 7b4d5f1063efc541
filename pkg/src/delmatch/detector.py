"""Deletion detection from a batch of correctly-matched row pairs.

The counting function S(d1, d2) is the number of columnwise deletion
patterns mapping d1 to d2, i.e. order-preserving embeddings of d2's column
sequence into d1's.  Counts are exact unbounded integers and posteriors are
exact Fractions, so the "certainly deleted" / "certainly retained" tests are
integer comparisons, never float ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb, sqrt

import numpy as np

from .model import Distribution, SeedBatch, derive_seed, _rng
from .infotheory import entropy

BRUTE_FORCE_PATTERN_GUARD = 10 ** 6

# Streams inside one detection-trial seed.
_TRIAL_STREAM_BATCH = 0
_TRIAL_STREAM_DELETION = 1


class InconsistentBatchError(ValueError):
    """The batch admits no deletion pattern at all (S = 0): it cannot be a
    correctly-matched pair."""


class GuardExceededError(ValueError):
    """A brute-force enumeration was refused because C(n, K) is too large."""


class Verdict(Enum):
    DELETED = "deleted"
    RETAINED = "retained"
    INCONCLUSIVE = "inconclusive"


def _as_batch_matrices(d1, d2):
    d1 = np.atleast_2d(np.asarray(d1))
    d2 = np.atleast_2d(np.asarray(d2))
    if d1.shape[0] != d2.shape[0]:
        raise ValueError(f"row counts differ: {d1.shape[0]} vs {d2.shape[0]}")
    return d1, d2


def _column_ids(d1, d2):
    """Label columns so that two columns get the same id iff they are equal
    entrywise over all rows.  Hash-free: ids come from a sort-based grouping,
    so equality is exact by construction."""
    n, k = d1.shape[1], d2.shape[1]
    stacked = np.concatenate([d1.T, d2.T], axis=0) if n + k else np.zeros((0, d1.shape[0]))
    if stacked.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    _, inverse = np.unique(stacked, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1).astype(np.int64)
    return inverse[:n], inverse[n:]


def count_embeddings(d1, d2) -> int:
    """S(d1, d2): the exact number of ways d2's columns embed, in order, into
    d1's columns with entrywise column equality.

    Standard subsequence-occurrence DP over column ids, O(n*K) big-int adds.
    """
    d1, d2 = _as_batch_matrices(d1, d2)
    n, k = d1.shape[1], d2.shape[1]
    if k > n:
        return 0
    ids1, ids2 = _column_ids(d1, d2)
    ids1 = ids1.tolist()
    ids2 = ids2.tolist()
    f = [1] + [0] * k
    for i, ci in enumerate(ids1):
        for t in range(min(i + 1, k), 0, -1):
            if ids2[t - 1] == ci:
                f[t] += f[t - 1]
    return f[k]


def _prefix_table(ids1, ids2):
    """tab[t][i] = number of embeddings of ids2[:t] into ids1[:i]."""
    n, k = len(ids1), len(ids2)
    tab = [[1] * (n + 1)] + [[0] * (n + 1) for _ in range(k)]
    for t in range(1, k + 1):
        row, prev, sym = tab[t], tab[t - 1], ids2[t - 1]
        for i in range(1, n + 1):
            row[i] = row[i - 1] + (prev[i - 1] if ids1[i - 1] == sym else 0)
    return tab


def _embedding_tables(d1, d2):
    d1, d2 = _as_batch_matrices(d1, d2)
    ids1, ids2 = _column_ids(d1, d2)
    ids1 = ids1.tolist()
    ids2 = ids2.tolist()
    fore = _prefix_table(ids1, ids2)
    back = _prefix_table(ids1[::-1], ids2[::-1])
    return ids1, ids2, fore, back


def posterior_deletions(batch: SeedBatch) -> list:
    """Exact posterior deletion probability of every column given the batch.

    Entry j is S(d1 with column j removed, d2) / S(d1, d2) as a Fraction.
    One forward and one backward prefix DP cover all n removals; the result
    is identical to recounting n+1 times (see posterior_deletions_naive).
    """
    n, k = batch.n, batch.retained_count
    _, _, fore, back = _embedding_tables(batch.d1, batch.d2)
    total = fore[k][n]
    if total == 0:
        raise InconsistentBatchError("no deletion pattern maps d1 to d2")
    out = []
    for j in range(n):
        # embeddings avoiding column j, split by how many of d2's columns
        # land strictly before it
        s_j = sum(fore[t][j] * back[k - t][n - 1 - j] for t in range(k + 1))
        out.append(Fraction(s_j, total))
    return out


def posterior_deletions_naive(d1, d2) -> list:
    """Reference implementation: re-count with each column removed in turn."""
    d1, d2 = _as_batch_matrices(d1, d2)
    total = count_embeddings(d1, d2)
    if total == 0:
        raise InconsistentBatchError("no deletion pattern maps d1 to d2")
    return [Fraction(count_embeddings(np.delete(d1, j, axis=1), d2), total)
            for j in range(d1.shape[1])]


def _typical_column_mask(d1, dist: Distribution, epsilon: float) -> np.ndarray:
    """Per-column weak typicality of d1's length-B columns (all True at B=0)."""
    big, n = d1.shape
    if big == 0:
        return np.ones(n, dtype=bool)
    scores = dist.neg_log2()[d1].mean(axis=0)
    return np.abs(scores - entropy(dist)) <= epsilon


def detect_f(batch: SeedBatch, dist: Distribution, epsilon: float) -> list:
    """Certainty classification of every column of d1.

    Deleted   iff the posterior is exactly 1 and the column is typical;
    Retained  iff the posterior is exactly 0 and the column is typical;
    Inconclusive otherwise.
    """
    posts = posterior_deletions(batch)
    typical = _typical_column_mask(batch.d1, dist, epsilon)
    verdicts = []
    for j in range(batch.n):
        if typical[j] and posts[j] == 1:
            verdicts.append(Verdict.DELETED)
        elif typical[j] and posts[j] == 0:
            verdicts.append(Verdict.RETAINED)
        else:
            verdicts.append(Verdict.INCONCLUSIVE)
    return verdicts


def detect_g(batch: SeedBatch, dist: Distribution, epsilon: float) -> list:
    """Column-presence detector: Deleted iff the column of d1 appears nowhere
    among d2's columns and is typical.  Never claims Retained.

    Whenever this says Deleted, detect_f says Deleted too.
    """
    ids1, ids2 = _column_ids(batch.d1, batch.d2)
    present = set(ids2.tolist())
    typical = _typical_column_mask(batch.d1, dist, epsilon)
    return [Verdict.DELETED if typical[j] and int(ids1[j]) not in present
            else Verdict.INCONCLUSIVE
            for j in range(batch.n)]


def brute_force_embeddings(d1, d2) -> int:
    """Oracle for count_embeddings: enumerate every K-subset of columns and
    count those equal to d2 columnwise.  Refuses when C(n, K) > 10^6."""
    d1, d2 = _as_batch_matrices(d1, d2)
    n, k = d1.shape[1], d2.shape[1]
    if k > n:
        return 0
    if comb(n, k) > BRUTE_FORCE_PATTERN_GUARD:
        raise GuardExceededError(f"C({n},{k}) exceeds {BRUTE_FORCE_PATTERN_GUARD}")
    ids1, ids2 = _column_ids(d1, d2)
    ids1 = ids1.tolist()
    target = tuple(ids2.tolist())
    return sum(1 for combo in combinations(range(n), k)
               if tuple(ids1[i] for i in combo) == target)


def brute_force_posterior(d1, d2) -> list:
    """Bayes-by-enumeration oracle: average the deletion indicator over all
    consistent patterns.  Every consistent pattern deletes exactly n-K
    columns, so the Bernoulli prior weight cancels and the average is
    uniform.  Same guard as brute_force_embeddings."""
    d1, d2 = _as_batch_matrices(d1, d2)
    n, k = d1.shape[1], d2.shape[1]
    if comb(n, max(k, 0)) > BRUTE_FORCE_PATTERN_GUARD:
        raise GuardExceededError(f"C({n},{k}) exceeds {BRUTE_FORCE_PATTERN_GUARD}")
    if k > n:
        raise InconsistentBatchError("d2 wider than d1")
    ids1, ids2 = _column_ids(d1, d2)
    ids1 = ids1.tolist()
    target = tuple(ids2.tolist())
    total = 0
    deleted_counts = [0] * n
    for combo in combinations(range(n), k):
        if tuple(ids1[i] for i in combo) != target:
            continue
        total += 1
        kept = set(combo)
        for j in range(n):
            if j not in kept:
                deleted_counts[j] += 1
    if total == 0:
        raise InconsistentBatchError("no deletion pattern maps d1 to d2")
    return [Fraction(c, total) for c in deleted_counts]


# ---------------------------------------------------------------------------
# Fast boolean kernel for Monte Carlo work.  The certainty tests need only
# S(d1 minus column j) == 0 and == S, which reduce to reachability questions
# on the same DP; no big integers required.  Equivalence with detect_f is a
# tested guarantee.

def certain_verdict_masks(d1, d2):
    """(certainly_deleted, certainly_retained) boolean masks per column.

    certainly_deleted[j]  <=> no embedding of d2 uses column j      (P_j = 1)
    certainly_retained[j] <=> no embedding of d2 avoids column j    (P_j = 0)

    Requires at least one embedding to exist; raises otherwise.
    """
    d1, d2 = _as_batch_matrices(d1, d2)
    n, k = d1.shape[1], d2.shape[1]
    if k > n:
        raise InconsistentBatchError("d2 wider than d1")
    ids1, ids2 = _column_ids(d1, d2)
    match = np.equal.outer(ids2, ids1)          # (k, n)

    nz_fore = np.zeros((k + 1, n + 1), dtype=bool)
    nz_fore[0] = True
    for t in range(1, k + 1):
        nz_fore[t][1:] = np.logical_or.accumulate(match[t - 1] & nz_fore[t - 1][:-1])

    match_rev = match[::-1, ::-1]
    nz_back = np.zeros((k + 1, n + 1), dtype=bool)
    nz_back[0] = True
    for t in range(1, k + 1):
        nz_back[t][1:] = np.logical_or.accumulate(match_rev[t - 1] & nz_back[t - 1][:-1])

    if not nz_fore[k][n]:
        raise InconsistentBatchError("no deletion pattern maps d1 to d2")

    used = np.zeros(n, dtype=bool)    # some embedding maps a d2 column onto j
    avoid = np.zeros(n, dtype=bool)   # some embedding leaves column j unused
    for t in range(k + 1):
        behind = nz_back[k - t][n - 1::-1]      # behind[j] = nz_back[k-t][n-1-j]
        avoid |= nz_fore[t][:n] & behind
        if t >= 1:
            used |= nz_fore[t - 1][:n] & match[t - 1] & behind
    return ~used, ~avoid


def detection_trial(dist: Distribution, n: int, B: int, delta: float,
                    epsilon: float, trial_seed: int):
    """One seeded-batch detection experiment.

    Samples a fresh B x n batch and a deletion pattern, runs the certainty
    detector, and returns (columns flagged Deleted among truly deleted ones,
    number of truly deleted columns).
    """
    rng_batch = _rng(trial_seed, _TRIAL_STREAM_BATCH)
    d1 = rng_batch.choice(dist.alphabet_size, size=(B, n),
                          p=dist.probabilities).astype(np.uint8)
    deleted = _rng(trial_seed, _TRIAL_STREAM_DELETION).random(n) < delta
    d2 = d1[:, ~deleted]
    deleted_total = int(deleted.sum())
    if deleted_total == 0:
        return 0, 0
    certainly_deleted, _ = certain_verdict_masks(d1, d2)
    typical = _typical_column_mask(d1, dist, epsilon)
    hits = int((certainly_deleted & typical & deleted).sum())
    return hits, deleted_total


def wilson_interval(successes: int, total: int, z: float = 1.96):
    """95% Wilson score interval for a binomial proportion."""
    if total == 0:
        return 0.0, 1.0
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * sqrt(phat * (1.0 - phat) / total + z * z / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class DetectionEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    detected: int
    deleted_columns: int
    trials: int

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def empirical_detection_probability(dist: Distribution, n: int, B: int,
                                    delta: float, trials: int, epsilon: float,
                                    rng_seed: int) -> DetectionEstimate:
    """Monte Carlo estimate of P(Deleted verdict | column truly deleted),
    pooled over trials and deleted columns, with a Wilson 95% interval."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    detected = deleted = 0
    for t in range(trials):
        hits, total = detection_trial(dist, n, B, delta, epsilon,
                                      derive_seed(rng_seed, t))
        detected += hits
        deleted += total
    if deleted == 0:
        raise RuntimeError("no columns were deleted in any trial; "
                           "estimate undefined (delta too small?)")
    lo, hi = wilson_interval(detected, deleted)
    return DetectionEstimate(detected / deleted, lo, hi, detected, deleted, trials)


def verdicts_to_csv(verdicts, posteriors) -> str:
    """One line per column: index, verdict, posterior numerator, denominator."""
    lines = ["index,verdict,posterior_num,posterior_den"]
    for j, (v, p) in enumerate(zip(verdicts, posteriors)):
        lines.append(f"{j},{v.value},{p.numerator},{p.denominator}")
    return "\n".join(lines) + "\n"
