"""``tedhr-bench``: Monte-Carlo runs and the performance table from the shell."""

import argparse
import logging
import os
import sys

from .config import ExperimentConfig, load_config
from .errors import IoError, TedhrError
from .export import collect, export, format_table
from .harness import CONTROLLERS, monte_carlo


def _parser():
    p = argparse.ArgumentParser(prog="tedhr-bench", description="Tilted hexarotor controller benchmark")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte-Carlo runs of one controller in one scenario")
    run.add_argument("--scenario", required=True, type=str.lower, choices=["a", "b", "c"])
    run.add_argument("--controller", required=True, type=str.lower, choices=list(CONTROLLERS))
    run.add_argument("--runs", type=int, default=1)
    run.add_argument("--seed", type=int, default=0, help="seed of the first run; run i uses seed + i")
    run.add_argument("--config", help="JSON config file")
    run.add_argument("--out", required=True, help="results root; a <controller>_<scenario> folder is created")
    run.add_argument("--dt-ctrl", type=float, default=None)
    run.add_argument("--dt-sim", type=float, default=None)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--fail-on-divergence", action="store_true", help="exit with status 2 if any run diverged")

    table = sub.add_parser("table", help="rebuild the summary table from all results under --out")
    table.add_argument("--out", required=True)
    return p


def _run(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.dt_ctrl or args.dt_sim:
        cfg = cfg.with_timing(args.dt_ctrl, args.dt_sim)
    scenario = args.scenario.upper()
    cfg = cfg.with_scenario(scenario)
    summary, records = monte_carlo(cfg, scenario, args.controller, args.runs, args.seed, args.workers)
    out_dir = os.path.join(args.out, f"{args.controller}_{scenario}")
    export(records, summary, out_dir, cfg)
    print(format_table([summary]), end="")
    print(f"wrote {len(records)} run(s) to {out_dir}")
    if args.fail_on_divergence and summary.diverged:
        return 2
    return 0


def _table(args):
    if not os.path.isdir(args.out):
        raise IoError(f"{args.out} is not a directory")
    text = format_table(collect(args.out))
    path = os.path.join(args.out, "table.txt")
    with open(path, "w") as fh:
        fh.write(text)
    print(text, end="")
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _run(args) if args.command == "run" else _table(args)
    except (TedhrError, OSError) as exc:
        print(f"tedhr-bench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
