"""Command-line entry point.

    geosim run --scenario PATH [--seed N] [--ticks N] [--out PATH]
               [--stride N] [--dump-agents] [--trace PATH]
               [--replay-log PATH]
    geosim check PATH
    geosim conformance [PATH | METHODOLOGY] [--format records]

Exit codes: 0 success, 1 parse/validation/usage failure, 2 runtime
simulation error. Everything nondeterministic (timings, diagnostics)
goes to stderr; stdout and output files are byte-stable for a given
scenario and seed. GEOSIM_MIND_ENDPOINT overrides the external mind
backend target for all agents.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

from geosim.conformance import matrix, profile_from_scenario, shipped_profiles
from geosim.conformance.matrix import check_coverage
from geosim.dsl import compile_doc, format_doc, parse, validate
from geosim.dsl.doc import ScenarioParseError
from geosim.errors import GeosimError
from geosim.sim import trajectory
from geosim.sim.runner import Simulation


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load(path: str):
    """Parse and validate; prints problems to stderr and returns None on
    failure."""
    try:
        source = _read(path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, None
    try:
        doc = parse(source)
    except ScenarioParseError as exc:
        for e in exc.errors:
            print(f"{path}:{e.line}:{e.column}: {e.message}", file=sys.stderr)
        return None, None
    report = validate(doc)
    for entry in report.entries:
        if entry.severity != "info":
            print(f"{path}: {entry}", file=sys.stderr)
    if not report.ok:
        return None, None
    return doc, source


def cmd_run(args) -> int:
    loaded, source = _load(args.scenario)
    if loaded is None:
        return 1
    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()
    endpoint = os.environ.get("GEOSIM_MIND_ENDPOINT") or None
    started = time.monotonic()
    try:
        compiled = compile_doc(loaded)
        sim = Simulation(compiled, seed=args.seed, ticks=args.ticks,
                         stride=args.stride, dump_agents=args.dump_agents or None,
                         replay_log_path=args.replay_log,
                         endpoint_override=endpoint,
                         collect_event_trace=args.trace is not None)
        summary = sim.run(header=trajectory.header_line(digest, sim.seed))
    except GeosimError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.monotonic() - started

    output_format = args.format or compiled.settings.output
    lines = (trajectory.to_table(sim.lines) if output_format == "table"
             else sim.lines)
    body = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("\n".join(sim.event_lines) + ("\n" if sim.event_lines else ""))
    for note in sim.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    print(f"final tick {summary.final_tick}, "
          f"{summary.automata + summary.entities} entities, "
          f"{elapsed:.3f}s wall, {summary.backend} kernel", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    try:
        source = _read(args.path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        doc = parse(source)
    except ScenarioParseError as exc:
        for e in exc.errors:
            print(f"{args.path}:{e.line}:{e.column}: {e.message} "
                  f"(at {e.token!r})" if e.token else
                  f"{args.path}:{e.line}:{e.column}: {e.message}")
        return 1
    report = validate(doc)
    sys.stdout.write(str(report))
    return 0 if report.ok else 1


def cmd_fmt(args) -> int:
    loaded, _source = _load(args.path)
    if loaded is None:
        return 1
    sys.stdout.write(format_doc(loaded))
    return 0


def cmd_conformance(args) -> int:
    profiles = shipped_profiles()
    if args.target is None:
        m = matrix(profiles)
        sys.stdout.write(m.render_records() if args.format == "records"
                         else m.render_text())
        return 0
    if os.path.exists(args.target):
        loaded, _source = _load(args.target)
        if loaded is None:
            return 1
        profile = profile_from_scenario(loaded)
        row = check_coverage(profile)
        m = matrix([profile])
        sys.stdout.write(m.render_records() if args.format == "records"
                         else m.render_text())
        return 0
    for p in profiles:
        if p.name == args.target:
            m = matrix([p])
            sys.stdout.write(m.render_records() if args.format == "records"
                             else m.render_text())
            return 0
    print(f"error: {args.target!r} is neither a scenario file nor a known "
          f"methodology ({', '.join(p.name for p in profiles)})",
          file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geosim",
        description="geographic automata and multi-agent geosimulation")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario")
    run.add_argument("--scenario", required=True)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--ticks", type=int, default=None)
    run.add_argument("--stride", type=int, default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--trace", default=None,
                     help="write processed-event records to this file")
    run.add_argument("--replay-log", default=None,
                     help="record external mind exchanges to this file")
    run.add_argument("--dump-agents", action="store_true")
    run.add_argument("--format", choices=("records", "table"), default=None,
                     help="override the scenario's output format")
    run.set_defaults(fn=cmd_run)

    check = sub.add_parser("check", help="parse and validate a scenario")
    check.add_argument("path")
    check.set_defaults(fn=cmd_check)

    fmt = sub.add_parser("fmt", help="print the canonical form of a scenario")
    fmt.add_argument("path")
    fmt.set_defaults(fn=cmd_fmt)

    conf = sub.add_parser(
        "conformance",
        help="print the methodology coverage matrix or a scenario profile")
    conf.add_argument("target", nargs="?", default=None)
    conf.add_argument("--format", choices=("text", "records"), default="text")
    conf.set_defaults(fn=cmd_conformance)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
