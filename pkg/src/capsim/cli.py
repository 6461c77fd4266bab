"""Command-line surface.

Subcommands: simulate, check, prove, frontier, tp. Exit codes: 0 for
success (for ``prove``, success means the expected violation WAS
found), 1 for violations or a failed bound, 2 for configuration and
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .checker import (
    HistoryIntegrityError,
    bound_holds,
    check,
    extract_history,
)
from .config import ConfigError, ScenarioConfig
from .harness import ProofReplaySpec, frontier_csv, frontier_sweep, proof_replay
from .kernel import SimulationError, run_scenario
from .trace import Trace, TraceParseError


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    return data


def _cmd_simulate(args) -> int:
    config = ScenarioConfig.from_dict(_load_json(args.config))
    trace = run_scenario(config)
    if args.output:
        trace.write(args.output)
    else:
        sys.stdout.write(trace.to_jsonl())
    return 0


def _cmd_check(args) -> int:
    try:
        trace = Trace.read(args.trace)
        history = extract_history(trace)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.trace}: {exc.strerror}") from exc
    report = check(history, args.tc, args.ta, time_ref=args.time_ref)
    print(report.to_json())
    code = 0 if report.clean else 1
    if args.tp is not None:
        holds = bound_holds(report, args.tp, args.slack)
        print(f"bound tp={args.tp} slack={args.slack} holds={str(holds).lower()}")
        if not holds:
            code = 1
    return code


def _cmd_prove(args) -> int:
    spec = ProofReplaySpec.from_dict(_load_json(args.spec))
    report = proof_replay(spec)
    print(report.to_json())
    if report.clean:
        print("theorem: no violation found (unexpected)")
        return 1
    print("theorem: violation found")
    return 0


def _cmd_frontier(args) -> int:
    base = _load_json(args.config)
    deadlines = [int(part) for part in args.deadlines.split(",") if part != ""]
    rows = frontier_sweep(args.tp, deadlines, base)
    text = frontier_csv(rows)
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(row.bound_ok for row in rows) else 1


def _cmd_tp(args) -> int:
    config = ScenarioConfig.from_dict(_load_json(args.config))
    print(config.partitions.max_partition_span(config.horizon))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capsim",
        description=(
            "Deterministic simulator and trace checker for bounded-staleness "
            "consistency, bounded-latency availability, and partition spans."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario and emit its trace")
    p.add_argument("config", help="scenario config JSON")
    p.add_argument("-o", "--output", help="trace output path (default: stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="verify a trace against declared bounds")
    p.add_argument("trace", help="trace JSONL file")
    p.add_argument("--tc", type=int, required=True, help="declared staleness bound")
    p.add_argument("--ta", type=int, required=True, help="declared latency bound")
    p.add_argument("--tp", type=int, help="partition span for the tradeoff bound")
    p.add_argument("--slack", type=int, default=0, help="slack for the bound check")
    p.add_argument(
        "--time-ref",
        choices=("response", "invoke"),
        default="response",
        help="anchor reads at their response tick (default) or invoke tick",
    )
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("prove", help="replay the contradiction scenario")
    p.add_argument("spec", help="proof replay spec JSON")
    p.set_defaults(func=_cmd_prove)

    p = sub.add_parser("frontier", help="sweep response deadlines, emit CSV")
    p.add_argument("config", help="base config JSON (latency, seed, G)")
    p.add_argument("--tp", type=int, required=True, help="partition span to impose")
    p.add_argument(
        "--deadlines", required=True, help="comma-separated deadline ticks"
    )
    p.add_argument("-o", "--output", help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_frontier)

    p = sub.add_parser("tp", help="print the schedule's partition span")
    p.add_argument("config", help="scenario config JSON")
    p.set_defaults(func=_cmd_tp)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (TraceParseError, HistoryIntegrityError) as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
