"""Command line entry point: ``vitaslam run|compare|replay``.

Exit codes: 0 on success, 2 for a bad config or arguments, 3 when the run
itself fails (module error, unreadable log, I/O).
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

from .config import Config, ConfigError, load_config
from .pipeline import MODES, PipelineError, RunConfig, compare, run, run_log
from .simulator import LogParseError, ScriptEnded, Simulator, record

EXIT_OK, EXIT_CONFIG, EXIT_PIPELINE = 0, 2, 3


def _params(path) -> Config:
    return load_config(path) if path else Config()


def _summary(report) -> str:
    ate = report.ate_after_relax
    ate_s = "n/a" if ate is None else f"{ate['rmse_position']:.4f} m"
    return (f"{report.mode}: view templates {report.view_template_count}, "
            f"tactile templates {report.tactile_template_count}, "
            f"loop closures {len(report.loop_closure_events)}, ATE after relax {ate_s}")


def cmd_run(args) -> int:
    params = _params(args.config)
    cfg = RunConfig(args.mode, args.seed, args.cycles, params, args.out)
    if args.record:
        sim = Simulator(params, args.seed)
        record(sim.frames(args.cycles), args.record,
               {"config": params.to_dict(), "seed": args.seed})
    report = run(cfg)
    print(_summary(report))
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _params(args.config)
    a = RunConfig("visual_only", args.seed, args.cycles, params,
                  os.path.join(args.out, "visual_only"))
    b = RunConfig("vita", args.seed, args.cycles, params, os.path.join(args.out, "vita"))
    comp = compare(a, b)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "comparison.csv"), "w", newline="") as fh:
        csv.writer(fh).writerows(comp.table())
    with open(os.path.join(args.out, "growth.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["cycle", "visual_only_view_templates", "vita_view_templates"])
        w.writerows(comp.growth())
    for row in comp.table():
        print("  ".join(f"{'' if v is None else v!s:>18}" for v in row))
    return EXIT_OK


def cmd_replay(args) -> int:
    report = run_log(args.log, args.mode, args.out)
    print(_summary(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vitaslam",
                                 description="Visuo-tactile SLAM on a simulated arena.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate and map one run")
    p.add_argument("--config", help="key = value parameter file")
    p.add_argument("--mode", choices=MODES, default="vita")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cycles", type=int, help="stop early (default: whole script)")
    p.add_argument("--out", help="directory for CSV and SVG output")
    p.add_argument("--record", metavar="LOG", help="also write the sensor stream to LOG")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="visual_only against vita on the same stream")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--cycles", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("replay", help="map a recorded sensor log")
    p.add_argument("--log", required=True)
    p.add_argument("--mode", choices=MODES, default="vita")
    p.add_argument("--out")
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad usage, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (PipelineError, LogParseError, OSError, RuntimeError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (ConfigError, ScriptEnded, ValueError) as exc:
        # bad parameter values surface while building the world or script
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
