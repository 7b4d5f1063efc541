"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them).  Tolerances are fixed here, not
calibrated at runtime."""

import time
from fractions import Fraction
from itertools import product
from math import comb, log2

import numpy as np
import pytest
from scipy.stats import fisher_exact

from delmatch import (Distribution, SeedBatch, RateParams, achievable_rate,
                      entropy, binary_entropy, supersequence_count_exact,
                      supersequence_count_bound, count_embeddings,
                      brute_force_embeddings, posterior_deletions,
                      brute_force_posterior, detect_f, detect_g, Verdict,
                      ExperimentConfig)
from delmatch.harness import (run_simulate_match, run_simulate_detect,
                              _all_sequences, _count_containing)
from delmatch.model import _rng
from delmatch import cli

BERN = Distribution.bernoulli(0.5)
MASTER_SEED = 20260810
THREADS = 4


def _report(num, name, detail):
    print(f"[acceptance] C{num} {name}: PASS ({detail})")


def _random_pair(rng, n_max=12, b_max=3, consistent=True):
    q = int(rng.choice([2, 3]))
    n = int(rng.integers(1, n_max + 1))
    rows = int(rng.integers(0, b_max + 1))
    d1 = rng.integers(0, q, size=(rows, n)).astype(np.uint8)
    if consistent:
        deleted = rng.random(n) < rng.uniform(0.0, 0.9)
        d2 = d1[:, ~deleted]
    else:
        k = int(rng.integers(0, n + 1))
        d2 = rng.integers(0, q, size=(rows, k)).astype(np.uint8)
    return d1, d2


def test_c01_rate_formula_fidelity():
    started = time.time()
    dists = [Distribution.bernoulli(p) for p in
             (0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5)]
    dists += [Distribution.uniform(q) for q in (2, 3, 4, 8)]
    dists += [Distribution((0.2, 0.3, 0.5)), Distribution((0.1, 0.2, 0.3, 0.4)),
              Distribution((0.6, 0.2, 0.1, 0.1))]
    deltas = (0.0, 0.15, 0.3, 0.45)
    points = 0
    worst = 0.0
    for dist, delta in product(dists, deltas):
        q = dist.alphabet_size
        no_info = max(0.0, entropy(dist) - binary_entropy(delta)
                      - delta * log2(q - 1))
        full_info = (1.0 - delta) * entropy(dist)
        dev = max(abs(achievable_rate(RateParams(dist, delta, 0.0)) - no_info),
                  abs(achievable_rate(RateParams(dist, delta, 1.0)) - full_info))
        worst = max(worst, dev)
        assert dev <= 1e-12
        points += 1
    assert points >= 50
    elapsed = time.time() - started
    assert elapsed < 1.0
    _report(1, "rate formula fidelity",
            f"{points} grid points, max deviation {worst:.2e}, {elapsed:.2f}s")


def test_c02_figure_curve_reproduction():
    started = time.time()
    full = achievable_rate(RateParams(BERN, 0.4, 1.0))
    none = achievable_rate(RateParams(BERN, 0.4, 0.0))
    assert full == pytest.approx(0.600000, abs=1e-9)
    assert none == pytest.approx(0.029049, abs=1e-5)
    ratio = full / none
    assert ratio == pytest.approx(20.7, abs=0.1)
    elapsed = time.time() - started
    assert elapsed < 1.0
    _report(2, "rate-curve reproduction",
            f"R(a=1)={full:.6f}, R(a=0)={none:.6f}, ratio {ratio:.2f}, {elapsed:.2f}s")


def test_c03_counting_oracle_equivalence():
    started = time.time()
    rng = _rng(MASTER_SEED, 3)
    cases = 1000
    for i in range(cases):
        d1, d2 = _random_pair(rng, consistent=bool(i % 2))
        assert count_embeddings(d1, d2) == brute_force_embeddings(d1, d2)
    elapsed = time.time() - started
    assert elapsed < 60.0
    _report(3, "counting oracle equivalence", f"{cases} instances, {elapsed:.1f}s")


def test_c04_posterior_oracle_equivalence():
    started = time.time()
    rng = _rng(MASTER_SEED, 4)
    cases = 1000
    for _ in range(cases):
        d1, d2 = _random_pair(rng, consistent=True)
        post = posterior_deletions(SeedBatch(d1, d2))
        assert post == brute_force_posterior(d1, d2)
        assert sum(post) == Fraction(d1.shape[1] - d2.shape[1])
    elapsed = time.time() - started
    assert elapsed < 60.0
    _report(4, "posterior oracle equivalence", f"{cases} instances, {elapsed:.1f}s")


def test_c05_supersequence_count_and_bound():
    started = time.time()
    rng = _rng(MASTER_SEED, 5)
    checked = 0
    for q in (2, 3):
        for n in range(1, 13):
            seqs = _all_sequences(n, q)
            for k in range(0, n + 1):
                fixed = rng.integers(0, q, size=k)
                assert supersequence_count_exact(n, k, q) == \
                    _count_containing(seqs, fixed)
                checked += 1
    bound_checked = 0
    for q in (2, 3):
        for n in range(1, 21):
            for k in range(1, n + 1):
                if k * q < n:
                    continue
                exact = supersequence_count_exact(n, k, q)
                assert log2(exact) <= supersequence_count_bound(n, k, q) + 1e-12
                bound_checked += 1
    elapsed = time.time() - started
    assert elapsed < 30.0
    _report(5, "supersequence count and bound",
            f"{checked} exact cases, {bound_checked} bound cases, {elapsed:.1f}s")


def test_c06_detection_bound_never_violated():
    started = time.time()
    rows = []
    for delta in (0.25, 0.5):
        rows += run_simulate_detect(BERN, (16, 64, 256), (8, 16, 24), delta,
                                    epsilon=0.05, trials=500,
                                    master_seed=MASTER_SEED, threads=THREADS)
    margins = []
    for p in rows:
        slack = p.empirical_alpha + p.ci_half_width - p.bound
        assert slack >= 0.0, (p.n, p.B, p.delta, p.empirical_alpha, p.bound)
        margins.append(slack)
    elapsed = time.time() - started
    assert elapsed < 600.0
    _report(6, "detection bound never violated",
            f"{len(rows)} grid points, min slack {min(margins):.4f}, {elapsed:.0f}s")


def test_c07_g_implies_f():
    started = time.time()
    rng = _rng(MASTER_SEED, 7)
    dists = [BERN, Distribution.bernoulli(0.3), Distribution.uniform(3)]
    cases = 1000
    g_deleted = 0
    for i in range(cases):
        d1, d2 = _random_pair(rng, n_max=10, consistent=True)
        dist = dists[i % len(dists)]
        if int(d1.max(initial=0)) >= dist.alphabet_size:
            dist = Distribution.uniform(3)
        batch = SeedBatch(d1, d2)
        eps = float(rng.uniform(0.0, 0.6))
        f_v = detect_f(batch, dist, eps)
        for j, g in enumerate(detect_g(batch, dist, eps)):
            if g is Verdict.DELETED:
                g_deleted += 1
                assert f_v[j] is Verdict.DELETED
    elapsed = time.time() - started
    assert elapsed < 60.0
    _report(7, "g-Deleted implies f-Deleted",
            f"{cases} batches, {g_deleted} g-verdicts checked, {elapsed:.1f}s")


def test_c08_matching_trend_and_failure_regime():
    started = time.time()
    cfg = ExperimentConfig(dist=BERN, n_values=(16, 32), delta=0.2, trials=500,
                           master_seed=MASTER_SEED, rate=0.25 * (1 - 0.2),
                           alpha=1.0, threads=THREADS)
    p16, p32 = run_simulate_match(cfg)
    table = [[p16.mismatches, p16.evaluated - p16.mismatches],
             [p32.mismatches, p32.evaluated - p32.mismatches]]
    res = fisher_exact(table, alternative="greater")
    assert p16.mismatch_rate > p32.mismatch_rate
    assert res.pvalue < 0.01

    over = ExperimentConfig(dist=BERN, n_values=(32,), delta=0.2, trials=500,
                            master_seed=MASTER_SEED, rate=1.2 * entropy(BERN),
                            alpha=1.0, threads=THREADS)
    (pf,) = run_simulate_match(over)
    assert pf.mismatch_rate >= 0.9
    elapsed = time.time() - started
    assert elapsed < 600.0
    _report(8, "matching trend and failure regime",
            f"mismatch {p16.mismatch_rate:.4f} -> {p32.mismatch_rate:.4f} "
            f"(p={res.pvalue:.1e}); overload rate {pf.mismatch_rate:.2f}, "
            f"{elapsed:.0f}s")


def test_c09_pipeline_reduction(tmp_path):
    started = time.time()
    common = ["--dist", "bern:0.5", "--n", "16", "--rate", "0.2", "--delta",
              "0.3", "--trials", "50", "--seed", "777", "--threads", "1"]
    pipe_csv = tmp_path / "pipe.csv"
    match_csv = tmp_path / "match.csv"
    assert cli.main(["pipeline", "--B", "0", "--out", str(pipe_csv)] + common) == 0
    assert cli.main(["simulate-match", "--alpha", "0", "--out", str(match_csv)]
                    + common) == 0

    pipe_row = dict(zip(*[ln.split(",") for ln in
                          pipe_csv.read_text().splitlines()]))
    match_row = dict(zip(*[ln.split(",") for ln in
                           match_csv.read_text().splitlines()]))
    # shared result fields must agree byte for byte
    for col in ("n", "delta", "mismatch_rate", "CI"):
        assert pipe_row[col] == match_row[col], col
    assert pipe_row["detected_fraction"] == "0.000000"

    # and the pipeline output itself is reproducible byte for byte
    again = tmp_path / "pipe2.csv"
    assert cli.main(["pipeline", "--B", "0", "--out", str(again)] + common) == 0
    assert again.read_bytes() == pipe_csv.read_bytes()
    elapsed = time.time() - started
    assert elapsed < 60.0
    _report(9, "pipeline reduction at B=0",
            f"mismatch_rate {match_row['mismatch_rate']} identical, {elapsed:.1f}s")


def test_c10_byte_identical_output(tmp_path):
    started = time.time()
    commands = {
        "rates": ["rates", "--dist", "bern:0.5", "--deltas", "0:0.9:10",
                  "--alphas", "0,0.5,1"],
        "simulate-match": ["simulate-match", "--dist", "bern:0.5", "--n", "16",
                           "--rate", "0.2", "--delta", "0.2", "--alpha", "1",
                           "--trials", "40", "--seed", "5"],
        "simulate-detect": ["simulate-detect", "--dist", "bern:0.5", "--n",
                            "16,32", "--B", "8", "--delta", "0.5", "--trials",
                            "40", "--seed", "5"],
        "pipeline": ["pipeline", "--dist", "bern:0.5", "--n", "16", "--rate",
                     "0.25", "--delta", "0.3", "--B", "4", "--trials", "30",
                     "--seed", "5"],
    }
    for name, args in commands.items():
        outputs = []
        for i, threads in enumerate(("1", "8", "1")):
            out = tmp_path / f"{name}-{i}.csv"
            code = cli.main(args + ["--threads", threads, "--out", str(out)])
            assert code == 0, name
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2], name
    elapsed = time.time() - started
    assert elapsed < 300.0
    _report(10, "byte-identical output across workers and reruns",
            f"{len(commands)} commands, {elapsed:.0f}s")
