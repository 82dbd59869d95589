"""Command-line entry point.

Exit codes: 0 on success, 1 for configuration errors, 2 for runtime
failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (ExperimentConfig, ExperimentConfigError, iter_point_keys,
                      load_config, make_store, run_sweep)
from .linear_code import DEFAULT_CODE_SEED, export_code, generate_code, import_code
from .presets import PRESETS
from .scheduler import ConfigError, simulate_jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fifogrand",
        description="ORBGRAND decoding with fixed-throughput FIFO scheduling")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep from a config file or preset")
    run.add_argument("--config", type=Path, help="TOML experiment file")
    run.add_argument("--preset", choices=sorted(PRESETS), help="named preset")
    run.add_argument("--trials", type=int, help="override trial count")
    run.add_argument("--seed", type=int, help="override master seed")
    run.add_argument("--out", type=Path, default=Path("results"),
                     help="output directory (default: results/)")
    run.add_argument("--trace", action="store_true",
                     help="write a cycle trace (single-point fifo configs only)")
    run.add_argument("--workers", type=int, default=1,
                     help="parallel workers over Eb/N0 groups")

    listing = sub.add_parser("presets", help="list available presets")

    export = sub.add_parser("code-export", help="write a generated code's matrix file")
    export.add_argument("--n", type=int, required=True)
    export.add_argument("--k", type=int, required=True)
    export.add_argument("--seed", type=int, default=DEFAULT_CODE_SEED)
    export.add_argument("--out", type=Path, required=True)

    check = sub.add_parser("code-check", help="validate an exported matrix file")
    check.add_argument("path", type=Path)
    return parser


def _progress(message: str) -> None:
    print(message, file=sys.stderr, flush=True)


def _run_trace(config: ExperimentConfig, out_dir: Path) -> int:
    points = list(iter_point_keys(config))
    if config.mode != "fifo" or len(points) != 1:
        print("error: --trace needs a single-point fifo config", file=sys.stderr)
        return 1
    ebn0, schedule = points[0]
    store = make_store(config)
    profiles = store.get(ebn0)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / f"{config.name}.trace.txt"
    with trace_path.open("w") as fh:
        def sink(event):
            fh.write(f"{event.cycle}\t{event.kind}\t"
                     f"{'' if event.decoder is None else event.decoder}\t"
                     f"{'' if event.arrival_index is None else event.arrival_index}\t"
                     f"{'' if event.slot is None else event.slot}\n")
        simulate_jobs(schedule, profiles.jobs(), trace=sink)
    print(trace_path)
    return 0


def _cmd_run(args) -> int:
    if bool(args.config) == bool(args.preset):
        print("error: give exactly one of --config or --preset", file=sys.stderr)
        return 1
    if args.preset:
        preset = PRESETS[args.preset]
        path = preset.run(args.out, trials=args.trials, master_seed=args.seed,
                          progress=_progress)
        print(path)
        return 0
    config = load_config(args.config)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    config.validate()
    if args.trace:
        return _run_trace(config, args.out)
    path = run_sweep(config, args.out, progress=_progress, workers=args.workers)
    print(path)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "presets":
            for name in sorted(PRESETS):
                print(f"{name}: {PRESETS[name].description}")
            return 0
        if args.command == "code-export":
            export_code(generate_code(args.n, args.k, args.seed), args.out)
            print(args.out)
            return 0
        if args.command == "code-check":
            code = import_code(args.path)
            print(f"ok: systematic ({code.n}, {code.k}) code")
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except (ExperimentConfigError, ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted; partial results keep their resume marker", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
