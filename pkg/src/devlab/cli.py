"""Command line entry point: ``devlab run`` and ``devlab spectrum``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import lyapunov as ly
from .config import load_config
from .errors import ConfigError, DevlabError, RejectNonPositive, RejectReducible
from .experiments import run_experiment
from .iet import LabeledPermutation
from .output import write_outputs
from .trials import default_jobs, trial_seed

log = logging.getLogger("devlab")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _count(text):
    v = float(text)
    if v != int(v) or v < 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive integer")
    return int(v)


def build_parser():
    p = argparse.ArgumentParser(prog="devlab", description="Deviation spectrum laboratory.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment described by a config file")
    r.add_argument("config")
    r.add_argument("--jobs", type=_count, default=None, help="worker processes (default: all cores)")
    r.add_argument("--output", default=None, help="output directory (overrides output_dir)")

    s = sub.add_parser("spectrum", help="estimate the Lyapunov spectrum of a permutation")
    s.add_argument("--perm", required=True, help="e.g. ABCD/DCBA")
    s.add_argument("--steps", type=_count, default=10 ** 6, help="Zorich steps (1e6 accepted)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--k", type=int, default=None, help="number of exponents (default: d)")
    return p


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"devlab: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"devlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.output:
        cfg.output_dir = args.output
    jobs = default_jobs() if args.jobs is None else args.jobs
    try:
        outcome = run_experiment(cfg, jobs)
    except (ConfigError, RejectReducible, RejectNonPositive, ValueError) as exc:
        print(f"devlab: {cfg.experiment}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DevlabError as exc:
        print(f"devlab: {cfg.experiment}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = write_outputs(outcome, cfg.output_dir)
    report = outcome.report
    for row in report.rows:
        est = f"{row.estimate:.6g}" if isinstance(row.estimate, float) else row.estimate
        print(f"{row.verdict:4}  {row.metric:28} {est}")
    for note in report.notes:
        print(f"note: {note}")
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict}: {cfg.experiment} in {report.wall_clock:.1f}s -> {out}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_spectrum(args) -> int:
    try:
        perm = LabeledPermutation.parse(args.perm)
        rep = ly.estimate_spectrum(perm, trial_seed(args.seed, 0), args.steps, args.k)
    except (ValueError, RejectReducible) as exc:
        print(f"devlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DevlabError as exc:
        print(f"devlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{perm}  g={rep.g} sigma={rep.sigma}  steps={rep.steps} teich_time={rep.teich_time:.1f}")
    for i, (v, s) in enumerate(zip(rep.exponents, rep.stderr), start=1):
        print(f"nu_{i:<2} {v:+.6f}  +- {s:.6f}")
    return EXIT_PASS


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "run":
        return cmd_run(args)
    return cmd_spectrum(args)


if __name__ == "__main__":
    sys.exit(main())
