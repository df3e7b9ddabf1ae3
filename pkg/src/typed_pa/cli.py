"""Command-line entry point.

Subcommands:
  simulate            multi-seed growth runs from a config and/or flags
  field               level-curve CSVs for chosen 27*xyz levels
  theory              run every identity check suite, write report CSVs
  experiment NAME     canned figure-data reproductions
  check SUITE         one check suite; exit status 1 on failure

The output directory defaults to $TYPED_PA_OUT, then ./out.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import experiments
from .experiments import CHECK_SUITES, check_suite, load_config, \
    make_config, run_experiment, write_check_report, write_contours

EXPERIMENT_NAMES = ("fig_dist", "fig_circling", "trajectories")


def _default_out() -> str:
    return os.environ.get("TYPED_PA_OUT", "out")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--seed", type=int, dest="master_seed",
                   help="master seed for the run-index fan-out")
    p.add_argument("--seeds", type=int, help="number of runs")
    p.add_argument("--n-max", type=int, help="vertices to add per run")
    p.add_argument("--alpha", type=float,
                   help="attachment weight offset (> -2)")
    p.add_argument("--model",
                   help="rps | linear | uniform_visible | table file")
    p.add_argument("--start", help="k3 | k6 | start-graph file")
    p.add_argument("--m", type=int, help="edges per new vertex")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel seed processes")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typed-pa",
        description="Growth, analysis, and checks for preferential-attachment "
                    "graphs whose vertex types depend on sampled neighbors.")
    parser.add_argument("--out", help="output directory "
                        "(default $TYPED_PA_OUT or ./out)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run seeded growth experiments")
    _add_run_flags(p_sim)
    p_sim.add_argument("--name", help="experiment name for the manifest")

    p_field = sub.add_parser("field", help="emit level-curve CSVs")
    p_field.add_argument("--levels", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9",
                         help="comma-separated 27*xyz levels in (0, 1)")
    p_field.add_argument("--resolution", type=int, default=512,
                         help="rays per curve")

    sub.add_parser("theory", help="run all identity check suites")

    p_exp = sub.add_parser("experiment", help="canned figure reproductions")
    p_exp.add_argument("name", choices=EXPERIMENT_NAMES)
    p_exp.add_argument("--workers", type=int, default=1)
    p_exp.add_argument("--seeds", type=int, help="override the seed count")
    p_exp.add_argument("--n-max", type=int, help="override the run length")

    p_check = sub.add_parser("check", help="run one identity check suite")
    p_check.add_argument("suite", choices=CHECK_SUITES)
    return parser


def _cmd_simulate(args) -> int:
    overrides = dict(
        name=args.name, model=args.model, start=args.start, m=args.m,
        alpha=args.alpha, n_max=args.n_max, master_seed=args.master_seed,
        seeds=tuple(range(args.seeds)) if args.seeds is not None else None,
        output_dir=args.out)
    if args.config:
        cfg = load_config(args.config, **overrides)
    else:
        cfg = make_config(**overrides)
    manifest = run_experiment(cfg, workers=args.workers)
    print(f"{cfg.name}: {len(cfg.seeds)} runs to n={cfg.n_max} "
          f"-> {cfg.output_dir} (config {manifest['config_hash'][:12]})")
    return 0


def _cmd_field(args) -> int:
    levels = [float(tok) for tok in args.levels.split(",") if tok.strip()]
    manifest = write_contours(args.out, levels, args.resolution)
    print(f"contours for 27M in {levels} -> {args.out} "
          f"({len(manifest['files'])} files)")
    return 0


def _cmd_theory(args) -> int:
    status = 0
    for suite in CHECK_SUITES:
        report = check_suite(suite)
        path = write_check_report(report, args.out)
        verdict = "pass" if report.passed else "FAIL"
        print(f"{suite}: {verdict} ({len(report.rows)} checks) -> {path}")
        if not report.passed:
            status = 1
    return status


def _cmd_experiment(args) -> int:
    if args.name == "fig_dist":
        experiments.experiment_fig_dist(args.out, workers=args.workers,
                                        seeds=args.seeds, n_max=args.n_max)
    elif args.name == "fig_circling":
        experiments.experiment_fig_circling(args.out, workers=args.workers,
                                            n_max=args.n_max)
    else:
        experiments.experiment_trajectories(args.out)
    print(f"{args.name} -> {args.out}")
    return 0


def _cmd_check(args) -> int:
    report = check_suite(args.suite)
    path = write_check_report(report, args.out)
    verdict = "pass" if report.passed else "FAIL"
    print(f"{args.suite}: {verdict} ({len(report.rows)} checks) -> {path}")
    return 0 if report.passed else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.out is None:
        args.out = _default_out()
    handlers = {
        "simulate": _cmd_simulate,
        "field": _cmd_field,
        "theory": _cmd_theory,
        "experiment": _cmd_experiment,
        "check": _cmd_check,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
