"""Command-line front end.

Subcommands:

* ``run``    one config cell -> records CSV + summary JSON
* ``sweep``  (algorithm x T x seed) grid -> per-cell CSVs + aggregate CSV
* ``plot``   aggregate CSV -> regret/violation SVG figures
* ``verify`` run the acceptance suite, print one pass/fail line each
* ``tape``   export/import binary round tapes

Exit codes: 0 success, 1 runtime failure, 2 malformed config (with a
line-numbered message for JSON syntax errors).
"""

from __future__ import annotations

import argparse
import json
import sys


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SystemExit(f"config error: no such file: {path}").with_traceback(None)
    except json.JSONDecodeError as exc:
        print(f"config error at line {exc.lineno}: {exc.msg}", file=sys.stderr)
        raise SystemExit(2) from None


def _cmd_run(args) -> int:
    from .harness import ConfigError, run_single

    cfg = _load_config(args.config)
    try:
        records_path, summary_path = run_single(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(records_path)
    print(summary_path)
    return 0


def _cmd_sweep(args) -> int:
    from .harness import ConfigError, run_sweep

    cfg = _load_config(args.config)
    try:
        aggregate = run_sweep(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    print(aggregate)
    return 0


def _cmd_plot(args) -> int:
    from .harness import read_aggregate
    from .plots import plot_sweep

    rows = read_aggregate(args.input)
    for path in plot_sweep(rows, args.output_dir):
        print(path)
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all(only=args.only or None)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status}  {r.name:<{width}}  ({r.seconds:7.2f}s)  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 1 if failed else 0


def _cmd_tape(args) -> int:
    from .harness import _as_list, build_problem, validate_config
    from .tape import read_tape, write_tape

    if args.tape_cmd == "export":
        cfg = _load_config(args.config)
        validate_config(cfg, sweep=False)
        if cfg["problem"].get("name") != "matrix_completion":
            print("tape export supports matrix_completion problems only",
                  file=sys.stderr)
            return 2
        instance = build_problem(cfg["problem"], cfg["seeds"][0])
        horizon = _as_list(cfg["T"])[0]
        write_tape(args.out, instance, instance.rounds(horizon))
        print(args.out)
        return 0

    instance, rounds = read_tape(args.tape)
    info = {
        "m": instance.rows, "n": instance.cols, "k": instance.radius,
        "b": instance.reveals, "T": len(rounds), "seed": instance.seed,
    }
    print(json.dumps(info, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfoco",
        description="Projection-free online convex optimization benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration cell")
    p_run.add_argument("--config", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an (algorithm x T x seed) grid")
    p_sweep.add_argument("--config", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_plot = sub.add_parser("plot", help="render SVG figures from a sweep CSV")
    p_plot.add_argument("--input", required=True)
    p_plot.add_argument("--output-dir", required=True)
    p_plot.set_defaults(func=_cmd_plot)

    p_verify = sub.add_parser("verify", help="run the acceptance suite")
    p_verify.add_argument("--only", nargs="*",
                          help="criterion names to run (default: all)")
    p_verify.set_defaults(func=_cmd_verify)

    p_tape = sub.add_parser("tape", help="export or inspect round tapes")
    tape_sub = p_tape.add_subparsers(dest="tape_cmd", required=True)
    t_export = tape_sub.add_parser("export")
    t_export.add_argument("--config", required=True)
    t_export.add_argument("--out", required=True)
    t_import = tape_sub.add_parser("import")
    t_import.add_argument("--tape", required=True)
    p_tape.set_defaults(func=_cmd_tape)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
