"""Deterministic Monte Carlo experiment drivers and their CSV/manifest output.

Seeding scheme: every trial draws from
    trial_seed = SeedSequence([master_seed, point_index, trial_index])
and splits further into fixed streams (database, channel, batch, evaluation),
so results are byte-identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import expm1, log1p, log2

import numpy as np

from . import __version__
from .model import (Distribution, derive_seed, _rng, sample_database,
                    apply_deletion_channel, extract_seed_batch)
from . import model
from .infotheory import (entropy, RateParams, achievable_rate,
                         supersequence_count_exact, supersequence_count_bound,
                         detection_probability_bound)
from .matcher import MatcherConfig, default_epsilon, match_all, match_experiment
from .detector import (Verdict, detect_f, detect_g, detection_trial,
                       count_embeddings, brute_force_embeddings,
                       posterior_deletions, posterior_deletions_naive,
                       brute_force_posterior, certain_verdict_masks,
                       wilson_interval)
from . import detector

# Desk-scale guard: largest m*n a matching sweep will materialize
# (m ~ 2^16 rows at n = 64).  Overridable per config.
CELL_GUARD = 1 << 22

# Fixed stream ids inside one trial seed.
STREAM_DATABASE = 0
STREAM_CHANNEL = 1
STREAM_BATCH = 2
STREAM_EVAL = 3


class ConfigError(ValueError):
    """Bad or infeasible configuration; maps to CLI exit code 2."""


# ---------------------------------------------------------------------------
# Configuration


def parse_distribution(spec: str) -> Distribution:
    """Accepts 'bern:p', 'uniform:q', or an explicit 'p0,p1,...' list."""
    spec = spec.strip()
    try:
        if spec.startswith("bern:"):
            return Distribution.bernoulli(float(spec[5:]))
        if spec.startswith("uniform:"):
            return Distribution.uniform(int(spec[8:]))
        return Distribution(tuple(float(x) for x in spec.split(",")))
    except ValueError as exc:
        raise ConfigError(f"bad distribution spec {spec!r}: {exc}") from exc


def parse_float_grid(spec: str) -> tuple:
    """'start:stop:count' (inclusive linspace) or a comma list of values."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad grid spec {spec!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        return tuple(float(x) for x in np.linspace(start, stop, count))
    return tuple(float(x) for x in spec.split(","))


def parse_int_list(spec: str) -> tuple:
    return tuple(int(x) for x in str(spec).split(","))


def parse_config_file(path: str) -> dict:
    """Flat 'key = value' text config; '#' starts a comment line."""
    out = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """One matching or pipeline experiment description.

    Exactly one of rate/m fixes the row count (m = round(2^(n*rate)) when the
    rate is given); exactly one of alpha/batch_sizes picks the side-information
    mode (detection probability vs. seed rows).
    """

    dist: Distribution
    n_values: tuple
    delta: float
    trials: int
    master_seed: int
    rate: float = None
    m: int = None
    alpha: float = None
    batch_sizes: tuple = None
    epsilon: float = None
    detect_epsilon: float = None
    out: str = None
    threads: int = 1
    eval_rows: int = 128
    override_guards: bool = False

    def __post_init__(self):
        if (self.rate is None) == (self.m is None):
            raise ConfigError("exactly one of rate/m must be given")
        if (self.alpha is None) == (self.batch_sizes is None):
            raise ConfigError("exactly one of alpha/batch_sizes must be given")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ConfigError("n values must be positive")
        if not 0.0 <= self.delta < 1.0:
            raise ConfigError("delta must be in [0, 1)")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must be in [0, 1]")
        if self.batch_sizes is not None and any(b < 0 for b in self.batch_sizes):
            raise ConfigError("batch sizes must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.eval_rows < 1:
            raise ConfigError("eval_rows must be >= 1")

    def resolve_m(self, n: int) -> int:
        if self.m is not None:
            return self.m
        if n * self.rate > 512:
            raise ConfigError(f"2^({n}*{self.rate}) is beyond any supported size")
        return max(1, round(2.0 ** (n * self.rate)))

    def rate_for(self, n: int) -> float:
        return self.rate if self.rate is not None else log2(self.m) / n

    def matcher_epsilon(self) -> float:
        return self.epsilon if self.epsilon is not None else default_epsilon(self.dist)

    def detector_epsilon(self) -> float:
        return self.detect_epsilon if self.detect_epsilon is not None else self.matcher_epsilon()


# ---------------------------------------------------------------------------
# Per-trial workers (top-level so a process pool can pickle them)


def _match_trial(args):
    dist, n, m, delta, alpha, epsilon, trial_seed = args
    c1 = sample_database(dist, m, n, derive_seed(trial_seed, STREAM_DATABASE))
    exp = apply_deletion_channel(c1, delta, alpha,
                                 derive_seed(trial_seed, STREAM_CHANNEL))
    outcomes, _ = match_experiment(exp, MatcherConfig(epsilon=epsilon), dist)
    perm = exp.labeling.perm
    wrong = sum(1 for j, o in enumerate(outcomes)
                if not (o.is_match and int(perm[o.row]) == j))
    return wrong, m


def _virtual_match_trial(args):
    """Exact-distribution stand-in for _match_trial at sizes that cannot be
    materialized.  Uniform distributions only: every restricted row is
    typical, so a row is mismatched iff at least one of the other m-1 i.i.d.
    rows both contains it and survives typicality, which happens with
    probability F(L, K, q)/q^L per competitor, independent of the row's
    content.  The per-row mismatch indicator is sampled from its exact
    marginal for eval_rows rows per trial."""
    dist, n, m, delta, alpha, eval_rows, trial_seed = args
    chan_seed = derive_seed(trial_seed, STREAM_CHANNEL)
    deleted = _rng(chan_seed, model.STREAM_DELETION).random(n) < delta
    detect_draw = _rng(chan_seed, model.STREAM_DETECTION).random(n)
    detected = deleted & (detect_draw < alpha)
    big_k = int(n - deleted.sum())
    width = int(n - detected.sum())
    q = dist.alphabet_size
    p_col = float(Fraction(supersequence_count_exact(width, big_k, q), q ** width))
    if m <= 1:
        collision_prob = 0.0
    elif p_col >= 1.0:
        collision_prob = 1.0
    else:
        collision_prob = -expm1((m - 1) * log1p(-p_col))
    evaluated = int(min(m, eval_rows))
    draws = _rng(trial_seed, STREAM_EVAL).random(evaluated)
    return int((draws < collision_prob).sum()), evaluated


def _detect_trial(args):
    dist, n, B, delta, epsilon, trial_seed = args
    return detection_trial(dist, n, B, delta, epsilon, trial_seed)


def _pipeline_trial(args):
    dist, n, m, delta, B, epsilon, detect_epsilon, trial_seed = args
    c1 = sample_database(dist, m, n, derive_seed(trial_seed, STREAM_DATABASE))
    exp = apply_deletion_channel(c1, delta, 0.0,
                                 derive_seed(trial_seed, STREAM_CHANNEL))
    batch = extract_seed_batch(exp, B, derive_seed(trial_seed, STREAM_BATCH))
    verdicts = detect_f(batch, dist, detect_epsilon)
    detected = [j for j, v in enumerate(verdicts) if v is Verdict.DELETED]
    # Deleted verdicts are certainty claims, hence always true deletions.
    assert all(exp.deletion.flags[j] for j in detected)
    deleted_cols = n - exp.retained_count

    perm = exp.labeling.perm
    batch_images = set(int(perm[i]) for i in batch.source_rows)
    remaining = [j for j in range(m) if j not in batch_images]
    if not remaining:
        return 0, 0, len(detected), deleted_cols
    outcomes, _ = match_all(exp.c1, exp.c2.symbols[remaining], detected,
                            MatcherConfig(epsilon=epsilon), dist)
    wrong = sum(1 for pos, j in enumerate(remaining)
                if not (outcomes[pos].is_match and int(perm[outcomes[pos].row]) == j))
    return wrong, len(remaining), len(detected), deleted_cols


def _map_tasks(worker, tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    chunk = max(1, len(tasks) // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# Runners


@dataclass(frozen=True)
class RatePoint:
    delta: float
    alpha: float
    rate: float
    regime_ok: bool


def rates_csv(points):
    rows = [(_fmt(p.delta), _fmt(p.alpha), _fmt(p.rate),
             "true" if p.regime_ok else "false") for p in points]
    return "delta,alpha,rate,regime_ok", rows


def run_rates(dist: Distribution, deltas, alphas, out: str = None) -> list:
    """Achievable-rate table over a (delta, alpha) grid."""
    points = [RatePoint(d, a, achievable_rate(RateParams(dist, d, a)),
                        RateParams(dist, d, a).regime_ok)
              for a in alphas for d in deltas]
    if out:
        header, rows = rates_csv(points)
        _emit(out, "rates", header, rows,
              config_echo=[("dist", _dist_echo(dist)),
                           ("deltas", ",".join(_fmt(d) for d in deltas)),
                           ("alphas", ",".join(_fmt(a) for a in alphas))],
              master_seed=None, trial_seeds=())
    return points


@dataclass(frozen=True)
class MatchPoint:
    n: int
    rate: float
    delta: float
    alpha: float
    trials: int
    mismatches: int
    evaluated: int
    mismatch_rate: float
    ci_low: float
    ci_high: float
    mode: str

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def _choose_match_mode(cfg: ExperimentConfig, m: int, n: int) -> str:
    if m * n <= CELL_GUARD or cfg.override_guards:
        return "materialized"
    if cfg.dist.is_uniform():
        return "virtual"
    raise ConfigError(
        f"m*n = {m * n} exceeds the materialization guard {CELL_GUARD} and the "
        f"distribution is not uniform, so the exact closed-form mode does not "
        f"apply; reduce m to <= {max(1, CELL_GUARD // n)} at n = {n}, or set "
        f"override_guards to force materialization")


def run_simulate_match(cfg: ExperimentConfig) -> list:
    """Monte Carlo mismatch rates for the given-alpha side-information mode."""
    if cfg.alpha is None:
        raise ConfigError("simulate-match needs the given-alpha mode")
    started = time.time()
    epsilon = cfg.matcher_epsilon()
    points, seed_log = [], []
    for pidx, n in enumerate(cfg.n_values):
        m = cfg.resolve_m(n)
        mode = _choose_match_mode(cfg, m, n)
        seeds = [derive_seed(cfg.master_seed, pidx, t) for t in range(cfg.trials)]
        seed_log.extend((pidx, t, s) for t, s in enumerate(seeds))
        if mode == "materialized":
            tasks = [(cfg.dist, n, m, cfg.delta, cfg.alpha, epsilon, s) for s in seeds]
            results = _map_tasks(_match_trial, tasks, cfg.threads)
        else:
            tasks = [(cfg.dist, n, m, cfg.delta, cfg.alpha, cfg.eval_rows, s)
                     for s in seeds]
            results = _map_tasks(_virtual_match_trial, tasks, cfg.threads)
        wrong = sum(r[0] for r in results)
        evaluated = sum(r[1] for r in results)
        lo, hi = wilson_interval(wrong, evaluated)
        points.append(MatchPoint(n, cfg.rate_for(n), cfg.delta, cfg.alpha,
                                 cfg.trials, wrong, evaluated,
                                 wrong / evaluated, lo, hi, mode))
    if cfg.out:
        header, rows = match_csv(points)
        _emit(cfg.out, "simulate-match", header, rows,
              config_echo=_cfg_echo(cfg), master_seed=cfg.master_seed,
              trial_seeds=tuple(seed_log), elapsed=time.time() - started)
    return points


def match_csv(points):
    rows = [(str(p.n), _fmt(p.rate), _fmt(p.delta), _fmt(p.alpha),
             str(p.trials), _fmt(p.mismatch_rate), _fmt(p.ci_half_width))
            for p in points]
    return "n,R,delta,alpha,trials,mismatch_rate,CI", rows


@dataclass(frozen=True)
class DetectPoint:
    n: int
    B: int
    delta: float
    epsilon: float
    trials: int
    detected: int
    deleted: int
    empirical_alpha: float
    ci_low: float
    ci_high: float
    bound: float

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0


def run_simulate_detect(dist: Distribution, n_values, batch_sizes, delta: float,
                        epsilon: float, trials: int, master_seed: int,
                        threads: int = 1, out: str = None) -> list:
    """Empirical detection probability next to the analytic bound, per (n, B)."""
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    started = time.time()
    h = entropy(dist)
    points, seed_log = [], []
    grid = [(n, b) for n in n_values for b in batch_sizes]
    for pidx, (n, b) in enumerate(grid):
        seeds = [derive_seed(master_seed, pidx, t) for t in range(trials)]
        seed_log.extend((pidx, t, s) for t, s in enumerate(seeds))
        tasks = [(dist, n, b, delta, epsilon, s) for s in seeds]
        results = _map_tasks(_detect_trial, tasks, threads)
        detected = sum(r[0] for r in results)
        deleted = sum(r[1] for r in results)
        if deleted == 0:
            raise RuntimeError(f"no columns deleted at (n={n}, B={b}); "
                               f"empirical detection probability undefined")
        lo, hi = wilson_interval(detected, deleted)
        points.append(DetectPoint(n, b, delta, epsilon, trials, detected,
                                  deleted, detected / deleted, lo, hi,
                                  detection_probability_bound(n, b, delta, h, epsilon)))
    if out:
        header, rows = detect_csv(points)
        _emit(out, "simulate-detect", header, rows,
              config_echo=[("dist", _dist_echo(dist)),
                           ("n", ",".join(str(n) for n in n_values)),
                           ("B", ",".join(str(b) for b in batch_sizes)),
                           ("delta", repr(delta)), ("epsilon", repr(epsilon)),
                           ("trials", str(trials))],
              master_seed=master_seed, trial_seeds=tuple(seed_log),
              elapsed=time.time() - started)
    return points


def detect_csv(points):
    rows = [(str(p.n), str(p.B), _fmt(p.empirical_alpha),
             _fmt(p.ci_half_width), _fmt(p.bound)) for p in points]
    return "n,B,empirical_alpha,CI,theorem2_bound", rows


@dataclass(frozen=True)
class PipelinePoint:
    n: int
    B: int
    rate: float
    delta: float
    trials: int
    mismatches: int
    evaluated: int
    detected_cols: int
    deleted_cols: int
    mismatch_rate: float
    ci_low: float
    ci_high: float

    @property
    def ci_half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2.0

    @property
    def detected_fraction(self) -> float:
        return self.detected_cols / self.deleted_cols if self.deleted_cols else 0.0


def run_pipeline(cfg: ExperimentConfig) -> list:
    """Seeds -> certainty verdicts -> detected set -> match the remaining rows."""
    if cfg.batch_sizes is None:
        raise ConfigError("pipeline needs the seeded(B) mode")
    started = time.time()
    epsilon = cfg.matcher_epsilon()
    detect_eps = cfg.detector_epsilon()
    points, seed_log = [], []
    grid = [(n, b) for n in cfg.n_values for b in cfg.batch_sizes]
    for pidx, (n, b) in enumerate(grid):
        m = cfg.resolve_m(n)
        if b >= m:
            raise ConfigError(f"batch size {b} must be < m = {m}")
        if m * n > CELL_GUARD and not cfg.override_guards:
            raise ConfigError(
                f"m*n = {m * n} exceeds the materialization guard {CELL_GUARD}; "
                f"reduce m to <= {max(1, CELL_GUARD // n)} at n = {n}, or set "
                f"override_guards")
        seeds = [derive_seed(cfg.master_seed, pidx, t) for t in range(cfg.trials)]
        seed_log.extend((pidx, t, s) for t, s in enumerate(seeds))
        tasks = [(cfg.dist, n, m, cfg.delta, b, epsilon, detect_eps, s)
                 for s in seeds]
        results = _map_tasks(_pipeline_trial, tasks, cfg.threads)
        wrong = sum(r[0] for r in results)
        evaluated = sum(r[1] for r in results)
        detected_cols = sum(r[2] for r in results)
        deleted_cols = sum(r[3] for r in results)
        lo, hi = wilson_interval(wrong, evaluated) if evaluated else (0.0, 1.0)
        points.append(PipelinePoint(n, b, cfg.rate_for(n), cfg.delta,
                                    cfg.trials, wrong, evaluated, detected_cols,
                                    deleted_cols,
                                    wrong / evaluated if evaluated else 0.0,
                                    lo, hi))
    if cfg.out:
        header, rows = pipeline_csv(points)
        _emit(cfg.out, "pipeline", header, rows,
              config_echo=_cfg_echo(cfg), master_seed=cfg.master_seed,
              trial_seeds=tuple(seed_log), elapsed=time.time() - started)
    return points


def pipeline_csv(points):
    rows = [(str(p.n), str(p.B), _fmt(p.rate), _fmt(p.delta),
             _fmt(p.detected_fraction), _fmt(p.mismatch_rate),
             _fmt(p.ci_half_width)) for p in points]
    return "n,B,R,delta,detected_fraction,mismatch_rate,CI", rows


# ---------------------------------------------------------------------------
# Oracle check: exhaustive small-instance verification of the exact machinery


@dataclass
class OracleReport:
    suites: list
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


def _random_instance(rng, n_max=12, b_max=3, consistent=True):
    q = int(rng.choice([2, 3]))
    n = int(rng.integers(1, n_max + 1))
    b = int(rng.integers(0, b_max + 1))
    d1 = rng.integers(0, q, size=(b, n)).astype(np.uint8)
    if consistent:
        deleted = rng.random(n) < rng.uniform(0.0, 0.9)
        d2 = d1[:, ~deleted]
    else:
        k = int(rng.integers(0, n + 1))
        d2 = rng.integers(0, q, size=(b, k)).astype(np.uint8)
    return d1, d2


def check_counting(cases: int, seed: int, count_fn=count_embeddings) -> list:
    """count_embeddings == brute force on random small (consistent and
    arbitrary) instances; count_fn is injectable so a broken DP is provably
    caught."""
    failures = []
    rng = _rng(seed, 1)
    for i in range(cases):
        d1, d2 = _random_instance(rng, consistent=bool(i % 2))
        got, want = count_fn(d1, d2), brute_force_embeddings(d1, d2)
        if got != want:
            failures.append(f"counting case {i}: got {got}, brute force {want}, "
                            f"d1={d1.tolist()}, d2={d2.tolist()}")
    return failures


def check_posteriors(cases: int, seed: int) -> list:
    failures = []
    rng = _rng(seed, 2)
    for i in range(cases):
        d1, d2 = _random_instance(rng, consistent=True)
        n, k = d1.shape[1], d2.shape[1]
        batch = model.SeedBatch(d1, d2)
        fast = posterior_deletions(batch)
        naive = posterior_deletions_naive(d1, d2)
        brute = brute_force_posterior(d1, d2)
        if fast != naive or fast != brute:
            failures.append(f"posterior case {i}: fb={fast}, naive={naive}, "
                            f"brute={brute}, d1={d1.tolist()}, d2={d2.tolist()}")
            continue
        if sum(fast) != n - k:
            failures.append(f"posterior case {i}: sum {sum(fast)} != n-K = {n - k}")
        ids1, ids2 = detector._column_ids(d1, d2)
        present = set(ids2.tolist())
        for j in range(n):
            if int(ids1[j]) not in present and fast[j] != 1:
                failures.append(f"posterior case {i}: column {j} absent from d2 "
                                f"but posterior {fast[j]} != 1")
    return failures


def check_supersequence(seed: int, n_exact=9, n_bound=20) -> list:
    failures = []
    rng = _rng(seed, 3)
    for q in (2, 3):
        for n in range(1, n_exact + 1):
            seqs = _all_sequences(n, q)
            for k in range(0, n + 1):
                fixed = rng.integers(0, q, size=k)
                want = _count_containing(seqs, fixed)
                got = supersequence_count_exact(n, k, q)
                if got != want:
                    failures.append(f"F({n},{k},{q}) = {got}, brute force {want} "
                                    f"for fixed {fixed.tolist()}")
        for n in range(1, n_bound + 1):
            for k in range(1, n + 1):
                if k * q < n:
                    continue
                exact = supersequence_count_exact(n, k, q)
                bound = supersequence_count_bound(n, k, q)
                if log2(exact) > bound + 1e-12:
                    failures.append(f"bound violated at ({n},{k},{q}): "
                                    f"log2 F = {log2(exact)}, bound = {bound}")
    return failures


def _all_sequences(n: int, q: int) -> np.ndarray:
    grids = np.indices((q,) * n).reshape(n, -1).T
    return grids.astype(np.uint8)


def _count_containing(seqs: np.ndarray, fixed: np.ndarray) -> int:
    k = fixed.shape[0]
    if k == 0:
        return seqs.shape[0]
    progress = np.zeros(seqs.shape[0], dtype=np.int64)
    for col in range(seqs.shape[1]):
        wanted = fixed[np.minimum(progress, k - 1)]
        progress += (progress < k) & (seqs[:, col] == wanted)
    return int((progress >= k).sum())


def check_g_subset_f(cases: int, seed: int) -> list:
    failures = []
    rng = _rng(seed, 4)
    dists = [Distribution.bernoulli(0.5), Distribution.bernoulli(0.3),
             Distribution.uniform(3)]
    for i in range(cases):
        d1, d2 = _random_instance(rng, n_max=10, consistent=True)
        dist = dists[i % len(dists)]
        if int(d1.max(initial=0)) >= dist.alphabet_size:
            dist = Distribution.uniform(3)
        batch = model.SeedBatch(d1, d2)
        eps = float(rng.uniform(0.0, 0.5))
        f_verdicts = detect_f(batch, dist, eps)
        g_verdicts = detect_g(batch, dist, eps)
        for j, (g, f) in enumerate(zip(g_verdicts, f_verdicts)):
            if g is Verdict.DELETED and f is not Verdict.DELETED:
                failures.append(f"g=f case {i} col {j}: g Deleted but f {f.value}, "
                                f"d1={d1.tolist()}, d2={d2.tolist()}")
    return failures


def check_fast_kernel(cases: int, seed: int) -> list:
    failures = []
    rng = _rng(seed, 5)
    for i in range(cases):
        d1, d2 = _random_instance(rng, consistent=True)
        posts = posterior_deletions(model.SeedBatch(d1, d2))
        certain_del, certain_ret = certain_verdict_masks(d1, d2)
        want_del = np.array([p == 1 for p in posts])
        want_ret = np.array([p == 0 for p in posts])
        if not (np.array_equal(certain_del, want_del)
                and np.array_equal(certain_ret, want_ret)):
            failures.append(f"fast kernel case {i}: masks disagree with "
                            f"posteriors, d1={d1.tolist()}, d2={d2.tolist()}")
    return failures


def run_oracle_check(master_seed: int = 0, cases: int = 400) -> OracleReport:
    """Run every brute-force equivalence suite; counterexamples are collected
    verbatim."""
    suites = [
        ("embedding counts vs enumeration", check_counting(cases, master_seed)),
        ("posteriors: fb = naive = Bayes enumeration", check_posteriors(cases, master_seed)),
        ("supersequence count and bound", check_supersequence(master_seed)),
        ("g-Deleted subset of f-Deleted", check_g_subset_f(cases, master_seed)),
        ("boolean kernel vs exact posteriors", check_fast_kernel(cases, master_seed)),
    ]
    failures = [msg for _, fails in suites for msg in fails]
    return OracleReport([(name, len(fails) == 0) for name, fails in suites],
                        failures)


# ---------------------------------------------------------------------------
# CSV + manifest emission


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _dist_echo(dist: Distribution) -> str:
    return ",".join(repr(p) for p in dist.probabilities)


def _cfg_echo(cfg: ExperimentConfig) -> list:
    echo = [("dist", _dist_echo(cfg.dist)),
            ("n", ",".join(str(n) for n in cfg.n_values)),
            ("delta", repr(cfg.delta)), ("trials", str(cfg.trials))]
    if cfg.rate is not None:
        echo.append(("rate", repr(cfg.rate)))
    if cfg.m is not None:
        echo.append(("m", str(cfg.m)))
    if cfg.alpha is not None:
        echo.append(("alpha", repr(cfg.alpha)))
    if cfg.batch_sizes is not None:
        echo.append(("B", ",".join(str(b) for b in cfg.batch_sizes)))
    echo.append(("epsilon", repr(cfg.matcher_epsilon())))
    echo.append(("detect_epsilon", repr(cfg.detector_epsilon())))
    echo.append(("eval_rows", str(cfg.eval_rows)))
    echo.append(("override_guards", str(cfg.override_guards).lower()))
    return echo


def _emit(out: str, command: str, header: str, rows, config_echo,
          master_seed, trial_seeds, elapsed: float = 0.0) -> None:
    csv_text = header + "\n" + "".join(",".join(r) + "\n" for r in rows)
    data = csv_text.encode()
    with open(out, "wb") as f:
        f.write(data)
    digest = hashlib.sha256(data).hexdigest()
    lines = [
        f"artifact = delmatch {__version__}",
        f"command = {command}",
        f"created_utc = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}",
        f"elapsed_seconds = {elapsed:.3f}",
        f"csv_path = {out}",
        f"csv_sha256 = {digest}",
        "seed_rule = trial_seed = SeedSequence([master_seed, point_index, "
        "trial_index]) -> uint64; streams: 0 database, 1 channel, 2 batch, 3 eval",
    ]
    if master_seed is not None:
        lines.append(f"master_seed = {master_seed}")
    lines.extend(f"config.{k} = {v}" for k, v in config_echo)
    lines.extend(f"trial_seed.{p}.{t} = {s}" for p, t, s in trial_seeds)
    with open(str(out) + ".manifest.txt", "w") as f:
        f.write("\n".join(lines) + "\n")
