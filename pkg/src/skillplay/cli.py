"""Command line interface.

Subcommands:
  run      one experiment (world, behaviour count, variant flags)
  grid     the convergence-scaling grid over behaviour counts and variants
  speedup  recompute the asymptotic speedup from an emitted summary file
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness
from .params import Params, params_from_dict


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--world", default="book", help="book, tower, or use --world-file")
    parser.add_argument("--world-file", default=None,
                        help="JSON world definition (overrides --world)")
    parser.add_argument("--robots", type=int, default=1000, metavar="N",
                        help="replica count (default 1000)")
    parser.add_argument("--rollouts", type=int, default=300, metavar="T")
    parser.add_argument("--seed", type=int, default=12345)
    parser.add_argument("--smoothing", type=int, default=10,
                        help="centered moving-average window (default 10)")
    parser.add_argument("--schedule", default="uniform",
                        help="initial-state schedule: uniform, round_robin or fixed:<state>")
    parser.add_argument("--out", required=True, metavar="PATH")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="JSON file overriding the default learning parameters")
    parser.add_argument("--workers", type=int, default=1)


def _load_params(path) -> Params:
    if path is None:
        return Params()
    with open(path, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    if not isinstance(overrides, dict):
        raise ValueError(f"parameter config {path!r} must be a JSON object")
    return params_from_dict(overrides)


def _base_config(args, total_behaviours: int, active: bool, creative: bool):
    return harness.ExperimentConfig(
        world=args.world,
        world_file=args.world_file,
        total_behaviours=total_behaviours,
        active_learning=active or creative,
        creativity=creative,
        replicas=args.robots,
        rollouts=args.rollouts,
        master_seed=args.seed,
        smoothing_window=args.smoothing,
        state_schedule=args.schedule,
        params=_load_params(args.config),
    )


def _cmd_run(args) -> int:
    config = _base_config(args, args.behaviours, args.active_learning, args.creativity)
    curve = harness.run_experiment(config, workers=args.workers)
    result = harness.RunResult(config.variant, config.world, args.behaviours, curve)
    harness.emit_results([result], args.out, fmt=args.format)
    conv = curve.convergence_rollout()
    shown = conv if conv is not None else f"> {config.rollouts}"
    print(f"{config.variant} world={config.world} J={args.behaviours} "
          f"convergence_rollout={shown}")
    print(f"curves written to {args.out}; summary to {harness.summary_path_for(args.out)}")
    return 0


def _cmd_grid(args) -> int:
    behaviour_counts = tuple(int(x) for x in args.behaviours.split(","))
    variants = tuple(args.variants.split(","))
    base = _base_config(args, behaviour_counts[0], False, False)
    results = harness.run_grid(base, behaviour_counts, variants, workers=args.workers)
    harness.emit_results(results, args.out, fmt=args.format)
    summary = harness.summarize(results)
    for entry in summary["entries"]:
        conv = entry["convergence_rollout"]
        shown = conv if conv is not None else f"> {args.rollouts}"
        print(f"{entry['variant']:>8} J={entry['total_behaviours']:<3} "
              f"convergence_rollout={shown} baseline={entry['baseline_rollouts']}")
    for name, value in summary["speedups"].items():
        print(f"speedup {name} = {value:.4f}")
    print(f"curves written to {args.out}; summary to {harness.summary_path_for(args.out)}")
    return 0


def _cmd_speedup(args) -> int:
    summary = harness.load_summary(args.summary)
    value = harness.speedup_from_summary(summary)
    print(f"speedup active_vs_no_ext = {value:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skillplay",
        description="Simulated skill learning by playing: experiments and analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    _add_common(run)
    run.add_argument("--behaviours", type=int, default=5, metavar="J")
    run.add_argument("--active-learning", action="store_true")
    run.add_argument("--creativity", action="store_true")
    run.set_defaults(func=_cmd_run)

    grid = sub.add_parser("grid", help="run the behaviour-count x variant grid")
    _add_common(grid)
    grid.add_argument("--behaviours", default="5,10,15,20",
                      help="comma-separated behaviour counts")
    grid.add_argument("--variants", default="no_ext,active,creative",
                      help="comma-separated subset of no_ext,active,creative")
    grid.set_defaults(func=_cmd_grid)

    speedup = sub.add_parser("speedup", help="recompute speedup from a summary file")
    speedup.add_argument("--summary", required=True, metavar="PATH")
    speedup.set_defaults(func=_cmd_speedup)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
