"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 runtime failure, 3 archive
full while running with --strict-archive-full.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from .harness import ConfigError, RunConfig, compare_timing, run
from .metrics import load_reference_front
from .nsga2 import ArchiveFullError
from .problems import get_problem, problem_names

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_ARCHIVE_FULL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridmoea",
        description="Real-coded NSGA-II with an optional bounded grid archive "
        "of non-dominated solutions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute the runs described by a JSON config")
    p_run.add_argument("config", help="path to the JSON config file")
    p_run.add_argument("--out", help="output directory (overrides the config)")
    p_run.add_argument("--seed", type=int, help="base seed (overrides the config)")
    p_run.add_argument("--reps", type=int, help="repetitions (overrides the config)")
    p_run.add_argument(
        "--strict-archive-full",
        action="store_true",
        help="abort instead of warning when the archive runs out of room",
    )

    p_cmp = sub.add_parser(
        "compare-timing",
        help="time runs with and without the archive over timing_generations",
    )
    p_cmp.add_argument("config", help="JSON config with an archive block")
    p_cmp.add_argument("--out", help="directory for timing.csv / timing.txt")
    p_cmp.add_argument(
        "--strict-archive-full", action="store_true", help="abort on a full archive"
    )

    p_ref = sub.add_parser(
        "reference-front", help="build (and cache) a grid reference front"
    )
    p_ref.add_argument("problem", choices=problem_names())
    p_ref.add_argument("--grid", type=int, default=501, help="grid points per variable")
    p_ref.add_argument("--out", help="write the front as CSV to this file")
    p_ref.add_argument("--cache-dir", help="reference-front cache directory")
    return parser


def _cmd_run(args) -> int:
    config = RunConfig.from_file(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.reps is not None:
        overrides["repetitions"] = args.reps
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.strict_archive_full:
        overrides["archive_full"] = "error"
    if overrides:
        config = dataclasses.replace(config, **overrides)
    report = run(config)
    n = len(report.repetitions)
    print(f"wrote {n} repetition(s) to {report.out_dir}")
    for rep in report.repetitions:
        line = (
            f"  rep {rep['index']} (seed {rep['seed']}): "
            f"front {rep['population_front_size']}"
        )
        if rep["archive_size"]:
            line += f", archive {rep['archive_size']}"
        print(line)
    return EXIT_OK


def _cmd_compare_timing(args) -> int:
    config = RunConfig.from_file(args.config)
    if args.strict_archive_full:
        config = dataclasses.replace(config, archive_full="error")
    table = compare_timing(config)
    print(table.to_text(), end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "timing.csv").write_text(table.to_csv())
        (out / "timing.txt").write_text(table.to_text())
        print(f"wrote {out / 'timing.csv'} and {out / 'timing.txt'}")
    return EXIT_OK


def _cmd_reference_front(args) -> int:
    problem = get_problem(args.problem)
    front = load_reference_front(problem, args.grid, cache_dir=args.cache_dir)
    print(f"{args.problem}: {front.points.shape[0]} reference points at grid {args.grid}")
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = ",".join(f"f_{k+1}" for k in range(front.points.shape[1]))
        lines = [header]
        lines += [",".join(repr(float(v)) for v in row) for row in front.points]
        path.write_text("\n".join(lines) + "\n")
        print(f"wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare-timing":
            return _cmd_compare_timing(args)
        return _cmd_reference_front(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArchiveFullError as exc:
        print(f"archive full: {exc}", file=sys.stderr)
        return EXIT_ARCHIVE_FULL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
