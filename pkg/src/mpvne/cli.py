"""Command-line entry point.

Exit status: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .config import ALGORITHM_NAMES, ExperimentConfig
from .errors import ConfigError, VNEError
from .experiment import dump_seed_workload, dump_topology, run_experiment
from .workload import load_workload

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("mpvne")


def _seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpvne", description="Multi-domain VNE simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment and write metrics CSVs")
    r.add_argument("--config", metavar="PATH")
    r.add_argument("--algorithm", choices=[*ALGORITHM_NAMES, "all"])
    seeds = r.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, metavar="N", help="use seeds 0..N-1")
    seeds.add_argument("--seed-list", type=_seed_list, metavar="S1,S2,...")
    r.add_argument("--horizon", type=float, metavar="T")
    r.add_argument("--sampling", type=float, metavar="S")
    r.add_argument("--out", metavar="DIR")
    r.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    r.add_argument("--dump-topology", metavar="PATH", help="write the first seed's substrate as DOT")
    r.add_argument("--dump-workload", metavar="PATH", help="write the first seed's workload as JSONL")
    r.add_argument("--replay-workload", metavar="PATH", help="use this workload for every run")
    r.add_argument("--dry-run", action="store_true", help="only perform the dumps")

    c = sub.add_parser("config", help="print the effective configuration as JSON")
    c.add_argument("--config", metavar="PATH")
    c.add_argument("--out", metavar="PATH", help="write to a file instead of stdout")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    changes = {}
    if getattr(args, "algorithm", None):
        changes["algorithms"] = tuple(ALGORITHM_NAMES) if args.algorithm == "all" else (args.algorithm,)
    if getattr(args, "seeds", None) is not None:
        if args.seeds < 1:
            raise ConfigError("--seeds", "must be >= 1")
        changes["seeds"] = tuple(range(args.seeds))
    if getattr(args, "seed_list", None) is not None:
        changes["seeds"] = args.seed_list
    for name in ("horizon", "sampling"):
        if getattr(args, name, None) is not None:
            changes[name] = getattr(args, name)
    if args.command == "run" and args.out:
        changes["out"] = args.out
    return replace(cfg, **changes) if changes else cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "config":
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(cfg.to_json())
            else:
                sys.stdout.write(cfg.to_json())
            return EXIT_OK

        replay = None
        if args.replay_workload:
            try:
                replay = load_workload(args.replay_workload)
            except (OSError, ValueError, KeyError) as exc:
                print(f"configuration error: --replay-workload: {exc}", file=sys.stderr)
                return EXIT_CONFIG
        if args.dump_topology:
            dump_topology(cfg, args.dump_topology)
        if args.dump_workload:
            dump_seed_workload(cfg, args.dump_workload)
        if args.dry_run:
            return EXIT_OK
        report = run_experiment(cfg, jobs=max(1, args.jobs), replay=replay)
        print(f"wrote {len(report.runs)} runs and {report.summary_path}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (VNEError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
