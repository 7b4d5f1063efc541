"""Command-line entry point.

Subcommands: rates, simulate-match, simulate-detect, pipeline, oracle-check.
Values may come from flags or from a flat 'key = value' config file
(--config); flags win.  Exit codes: 0 success, 1 check failure, 2 usage
error.  Without --out, data commands print the CSV to stdout.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (ConfigError, ExperimentConfig, parse_config_file,
                      parse_distribution, parse_float_grid, parse_int_list,
                      run_rates, run_simulate_match, run_simulate_detect,
                      run_pipeline, run_oracle_check,
                      rates_csv, match_csv, detect_csv, pipeline_csv)

DEFAULTS = {
    "dist": "bern:0.5",
    "deltas": "0:0.95:20",
    "alphas": "0,0.25,0.5,0.75,1",
    "trials": 100,
    "seed": 0,
    "threads": 1,
    "eval_rows": 128,
    "cases": 400,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delmatch",
        description="Database matching under random column deletions: "
                    "rate curves, Monte Carlo matching and deletion-detection "
                    "experiments, and brute-force oracle checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="64-bit master seed (default 0)")
    common.add_argument("--out", help="output CSV path (default: print to stdout)")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per grid point")
    common.add_argument("--threads", type=int, help="worker processes (default 1)")

    p = sub.add_parser("rates", parents=[common],
                       help="achievable-rate table over a (delta, alpha) grid")
    p.add_argument("--dist", help="bern:p | uniform:q | p0,p1,...")
    p.add_argument("--deltas", help="comma list or start:stop:count grid")
    p.add_argument("--alphas", help="comma list of detection probabilities")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("simulate-match", parents=[common],
                       help="mismatch rate of the matching scheme under "
                            "given-alpha side information")
    _add_match_args(p)
    p.add_argument("--alpha", type=float, help="deletion detection probability")
    p.set_defaults(func=cmd_simulate_match)

    p = sub.add_parser("simulate-detect", parents=[common],
                       help="empirical deletion-detection probability vs the "
                            "analytic bound")
    p.add_argument("--dist", help="bern:p | uniform:q | p0,p1,...")
    p.add_argument("--n", help="comma list of column counts")
    p.add_argument("--B", help="comma list of seed batch sizes")
    p.add_argument("--delta", type=float, help="column deletion probability")
    p.add_argument("--epsilon", type=float, help="typicality slack")
    p.set_defaults(func=cmd_simulate_detect)

    p = sub.add_parser("pipeline", parents=[common],
                       help="end to end: seed rows -> detected deletions -> "
                            "match the remaining rows")
    _add_match_args(p)
    p.add_argument("--B", help="comma list of seed batch sizes")
    p.add_argument("--detect-epsilon", type=float,
                   help="typicality slack for the detector "
                        "(defaults to --epsilon)")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="exhaustive small-instance verification of the "
                            "exact counting machinery")
    p.add_argument("--cases", type=int, help="random cases per suite (default 400)")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def _add_match_args(p):
    p.add_argument("--dist", help="bern:p | uniform:q | p0,p1,...")
    p.add_argument("--n", help="comma list of column counts")
    p.add_argument("--rate", type=float, help="growth rate R; m = round(2^(n R))")
    p.add_argument("--m", type=int, help="explicit row count (alternative to --rate)")
    p.add_argument("--delta", type=float, help="column deletion probability")
    p.add_argument("--epsilon", type=float,
                   help="typicality slack (default 0.1 * H(X))")
    p.add_argument("--eval-rows", type=int,
                   help="rows evaluated per trial in closed-form mode")
    p.add_argument("--override-guards", action="store_true", default=None,
                   help="materialize beyond the m*n desk-scale guard")


def _get(args, cfgmap, key, conv=None, default=None, required=False):
    val = getattr(args, key.replace("-", "_"), None)
    if val is None and key in cfgmap:
        val = cfgmap[key]
    if val is None:
        val = DEFAULTS.get(key, default)
    if val is None:
        if required:
            raise ConfigError(f"missing required option --{key}")
        return None
    return conv(val) if conv else val


def _print_csv(header, rows):
    print(header)
    for r in rows:
        print(",".join(r))


def cmd_rates(args, cfgmap) -> int:
    dist = parse_distribution(_get(args, cfgmap, "dist"))
    deltas = parse_float_grid(str(_get(args, cfgmap, "deltas")))
    alphas = parse_float_grid(str(_get(args, cfgmap, "alphas")))
    out = _get(args, cfgmap, "out")
    points = run_rates(dist, deltas, alphas, out)
    if out:
        print(f"wrote {len(points)} rate points to {out}")
    else:
        _print_csv(*rates_csv(points))
    return 0


def _match_config(args, cfgmap, need_alpha: bool) -> ExperimentConfig:
    kw = dict(
        dist=parse_distribution(_get(args, cfgmap, "dist")),
        n_values=parse_int_list(_get(args, cfgmap, "n", required=True)),
        delta=_get(args, cfgmap, "delta", float, required=True),
        trials=_get(args, cfgmap, "trials", int),
        master_seed=_get(args, cfgmap, "seed", int),
        rate=_get(args, cfgmap, "rate", float),
        m=_get(args, cfgmap, "m", int),
        epsilon=_get(args, cfgmap, "epsilon", float),
        out=_get(args, cfgmap, "out"),
        threads=_get(args, cfgmap, "threads", int),
        eval_rows=_get(args, cfgmap, "eval_rows", int),
        override_guards=bool(_get(args, cfgmap, "override_guards",
                                  _parse_bool, default=False)),
    )
    if need_alpha:
        kw["alpha"] = _get(args, cfgmap, "alpha", float, required=True)
    else:
        kw["batch_sizes"] = parse_int_list(_get(args, cfgmap, "B", required=True))
        kw["detect_epsilon"] = _get(args, cfgmap, "detect-epsilon", float)
        if kw["detect_epsilon"] is None:
            kw["detect_epsilon"] = _get(args, cfgmap, "detect_epsilon", float)
    return ExperimentConfig(**kw)


def _parse_bool(v):
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def cmd_simulate_match(args, cfgmap) -> int:
    cfg = _match_config(args, cfgmap, need_alpha=True)
    points = run_simulate_match(cfg)
    if cfg.out:
        print(f"wrote {len(points)} points to {cfg.out}")
        for p in points:
            print(f"  n={p.n} m_eval={p.evaluated} mode={p.mode} "
                  f"mismatch_rate={p.mismatch_rate:.6f}")
    else:
        _print_csv(*match_csv(points))
    return 0


def cmd_simulate_detect(args, cfgmap) -> int:
    dist = parse_distribution(_get(args, cfgmap, "dist"))
    n_values = parse_int_list(_get(args, cfgmap, "n", required=True))
    batch_sizes = parse_int_list(_get(args, cfgmap, "B", required=True))
    delta = _get(args, cfgmap, "delta", float, required=True)
    epsilon = _get(args, cfgmap, "epsilon", float, default=0.05)
    trials = _get(args, cfgmap, "trials", int)
    seed = _get(args, cfgmap, "seed", int)
    threads = _get(args, cfgmap, "threads", int)
    out = _get(args, cfgmap, "out")
    points = run_simulate_detect(dist, n_values, batch_sizes, delta, epsilon,
                                 trials, seed, threads, out)
    if out:
        print(f"wrote {len(points)} points to {out}")
    else:
        _print_csv(*detect_csv(points))
    return 0


def cmd_pipeline(args, cfgmap) -> int:
    cfg = _match_config(args, cfgmap, need_alpha=False)
    points = run_pipeline(cfg)
    if cfg.out:
        print(f"wrote {len(points)} points to {cfg.out}")
        for p in points:
            print(f"  n={p.n} B={p.B} detected_fraction={p.detected_fraction:.6f} "
                  f"mismatch_rate={p.mismatch_rate:.6f}")
    else:
        _print_csv(*pipeline_csv(points))
    return 0


def cmd_oracle_check(args, cfgmap) -> int:
    seed = _get(args, cfgmap, "seed", int)
    cases = _get(args, cfgmap, "cases", int)
    report = run_oracle_check(seed, cases)
    lines = [f"{'ok  ' if ok else 'FAIL'} {name}" for name, ok in report.suites]
    lines += [f"counterexample: {msg}" for msg in report.failures]
    lines.append("oracle-check: " + ("all suites passed" if report.passed
                                     else f"{len(report.failures)} failure(s)"))
    print("\n".join(lines))
    out = _get(args, cfgmap, "out")
    if out:
        with open(out, "w") as f:
            f.write("\n".join(lines) + "\n")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits itself on usage errors / --help
        return int(exc.code or 0)
    try:
        cfgmap = parse_config_file(args.config) if args.config else {}
        return args.func(args, cfgmap)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
