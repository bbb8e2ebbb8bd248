"""Command-line entry point.

Exit codes: 0 completed, 1 consensus check failed, 2 bad flags or
unparsable input, 3 search/exploration budget exhausted, 4 lemma not
applicable to the given config.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import checker, protocol
from .discern import (
    LEMMAS,
    ConfigError,
    NotApplicable,
    OutOfRange,
    SearchBudgetExceeded,
    canonical_witness,
    decide_discerning,
    load_config,
    probe_consensus_number,
    refute,
    refute_by,
    view_sets,
)
from .discern.views import replay
from .shiftreg import ObjectKind

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET, EXIT_NOT_APPLICABLE = 0, 1, 2, 3, 4

TABLE_COLUMNS = ("width", "kind", "max_discerning_n", "first_non_discerning_n", "nodes_searched", "seconds")


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _kind(text: str) -> ObjectKind:
    try:
        return ObjectKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _width_range(text: str) -> range:
    lo, sep, hi = text.partition("-")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a width or range like 1-3, got {text!r}") from None
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad width range {text!r}")
    return range(lo_i, hi_i + 1)


def _pid_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated process ids, got {text!r}") from None


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print(text.rstrip("\n"))


# ---------------------------------------------------------------------------
# discern / witness
# ---------------------------------------------------------------------------


def cmd_discern(args) -> int:
    if args.config is not None:
        if args.width is not None or args.n is not None:
            raise UsageError("--config cannot be combined with --width/--n")
        config = load_config(args.config)
        views = view_sets(config, args.repeats)
        payload = {"config": config.to_json(), "discerning": views.disjoint(), "views": views.to_json()}
        lines = [f"discerning: {views.disjoint()}"]
        for j, states in views.conflicts().items():
            lines.append(f"  process {j}: R_A and R_B share {', '.join(sorted(map(str, states)))}")
        if not views.disjoint() and args.repeats == 1:
            try:
                cex = refute(config)
            except NotApplicable:
                cex = None
            if cex is not None:
                payload["counterexample"] = cex.to_json()
                lines.append(f"  {cex.lemma}: {list(cex.exec_a)} and {list(cex.exec_b)} both end in {cex.final_state}")
        _emit(args, payload, "\n".join(lines))
        return EXIT_OK

    if args.width is None or args.n is None:
        raise UsageError("discern needs --width and --n (or --config)")
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    started = time.perf_counter()
    result = decide_discerning(
        args.width, args.alphabet, args.n, args.kind,
        budget=args.budget, fast=args.fast, prune=not args.no_prune,
        repeats=args.repeats, jobs=args.jobs,
    )
    seconds = time.perf_counter() - started
    verdict = f"{args.n}-discerning" if result.discerning else f"NOT {args.n}-discerning"
    payload = {
        "width": args.width,
        "alphabet": args.alphabet,
        "kind": args.kind.value,
        "n": args.n,
        "discerning": result.discerning,
        "witness": result.witness.to_json() if result.witness else None,
        "nodes_searched": result.nodes,
        "symmetry_reduction": args.fast,
        "seconds": round(seconds, 3),
    }
    lines = [f"width-{args.width} {args.kind.value} register (alphabet {args.alphabet}): {verdict}"]
    if result.witness is not None:
        lines.append("witness (first in search order):")
        lines += ["  " + line for line in result.witness.to_text().splitlines()]
        try:
            canonical = canonical_witness(args.width, args.n, args.kind, args.alphabet)
        except OutOfRange:
            canonical = None
        if canonical is not None and args.repeats == 1:
            ok = view_sets(canonical).disjoint()
            payload["canonical_witness"] = canonical.to_json() | {"verified": ok}
            lines.append(f"canonical witness (verified={ok}):")
            lines += ["  " + line for line in canonical.to_text().splitlines()]
    lines.append(f"nodes searched: {result.nodes}  ({seconds:.2f}s{', symmetry-reduced' if args.fast else ''})")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_witness(args) -> int:
    config = canonical_witness(args.width, args.n, args.kind, args.alphabet)
    views = view_sets(config)
    payload = {"config": config.to_json(), "discerning": views.disjoint()}
    if args.views:
        payload["views"] = views.to_json()
    text = config.to_text() + f"# verified by enumeration: discerning={views.disjoint()}\n"
    _emit(args, payload, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# lemma
# ---------------------------------------------------------------------------


def _parse_sets(text: str):
    parts = text.split(";")
    if len(parts) != 4:
        raise UsageError("--sets needs four ';'-separated id lists: A1;A2;B1;B2")
    try:
        return tuple(frozenset(int(t) for t in part.replace(",", " ").split()) for part in parts)
    except ValueError:
        raise UsageError(f"bad --sets value {text!r}") from None


def cmd_lemma(args) -> int:
    config = load_config(args.config)
    sets = _parse_sets(args.sets) if args.sets else None
    if sets is not None and args.lemma != "rllr":
        raise UsageError("--sets only applies to the rllr lemma")
    try:
        cex = refute_by(args.lemma, config, sets)
    except NotApplicable as exc:
        _emit(args, {"lemma": args.lemma, "applicable": False, "reason": str(exc)}, f"not applicable: {exc}")
        return EXIT_NOT_APPLICABLE
    end_a, end_b = replay(config, cex.exec_a), replay(config, cex.exec_b)
    payload = cex.to_json() | {"applicable": True, "replayed": [str(end_a), str(end_b)]}
    text = "\n".join([
        f"lemma {args.lemma}: overlap on process {cex.overlap}",
        f"  A-first {' '.join(map(str, cex.exec_a))} -> {end_a}",
        f"  B-first {' '.join(map(str, cex.exec_b))} -> {end_b}",
    ])
    _emit(args, payload, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# consensus / trace-replay
# ---------------------------------------------------------------------------


def _inputs(args) -> tuple:
    if args.inputs is None:
        return tuple(str(i) for i in range(1, args.n + 1))
    values = tuple(v.strip() for v in args.inputs.split(","))
    if len(values) != args.n or not all(values):
        raise UsageError(f"--inputs needs exactly {args.n} non-empty values")
    return values


def _build(args) -> protocol.Protocol:
    built = protocol.build_consensus(args.n, args.width, args.kind)
    for pid in args.invert or ():
        if not 1 <= pid <= args.n:
            raise UsageError(f"--invert: no process {pid}")
        built = protocol.invert_classification(built, pid)
    return built


def cmd_consensus(args) -> int:
    inputs = _inputs(args)
    if args.mode == "exhaustive" and args.samples is not None:
        raise UsageError("--samples only applies to --mode random")
    built = _build(args)
    if args.mode == "exhaustive":
        verdict = checker.explore_all_schedules(built, inputs, budget=args.budget)
    else:
        verdict = checker.random_schedules(built, inputs, args.seed, args.samples or 1000)
    payload = verdict.to_json()
    text = "\n".join(
        [f"{k}: {v}" for k, v in payload.items() if k != "counterexample"]
        + (["counterexample:"] + ["  " + line for line in verdict.counterexample] if verdict.counterexample else [])
    )
    _emit(args, payload, text)
    return EXIT_OK if verdict.ok else EXIT_FAILED


def cmd_trace_replay(args) -> int:
    if (args.schedule is None) == (args.trace is None):
        raise UsageError("give exactly one of --schedule or --trace")
    inputs = _inputs(args)
    built = _build(args)
    if args.trace is not None:
        schedule = checker.parse_trace_pids(Path(args.trace).read_text().splitlines())
    else:
        schedule = args.schedule
    events, decisions = checker.run_schedule(built, inputs, schedule)
    payload = {"trace": [e.format() for e in events], "decisions": decisions}
    text = "\n".join([e.format() for e in events] + [f"decisions: {decisions}"])
    _emit(args, payload, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def cmd_table(args) -> int:
    rows = []
    spent = 0
    for w in args.widths:
        started = time.perf_counter()
        budget = None if args.budget is None else args.budget - spent
        probe = probe_consensus_number(
            w, args.kind, args.alphabet, args.max_n,
            budget=budget, fast=args.fast, jobs=args.jobs,
        )
        spent += probe.nodes
        rows.append({
            "width": w,
            "kind": args.kind.value,
            "max_discerning_n": probe.label,
            "first_non_discerning_n": probe.first_non_discerning_n,
            "nodes_searched": probe.nodes,
            "seconds": round(time.perf_counter() - started, 3),
        })
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
        print(buf.getvalue().rstrip("\n"))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # accepted before or after the subcommand; the subcommand copies must not clobber with defaults
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--json", action="store_true", default=default(False), help="machine-readable output")
    parser.add_argument("--jobs", type=_positive, default=default(1), help="worker processes for searches")
    parser.add_argument("--budget", type=_positive, default=default(None), help="node/state cap")
    parser.add_argument("--seed", type=int, default=default(0), help="seed for randomized modes")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    register = argparse.ArgumentParser(add_help=False)
    register.add_argument("--kind", type=_kind, default=ObjectKind.LOGICAL)
    register.add_argument("--alphabet", type=_positive, default=2)

    parser = argparse.ArgumentParser(prog="shiftcons", description="Shift-register consensus toolkit.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discern", parents=[common, register], help="decide n-discernibility by exhaustive search")
    p.add_argument("--width", type=_positive)
    p.add_argument("--n", type=_positive)
    p.add_argument("--config", help="check one config file instead of searching")
    p.add_argument("--fast", action="store_true", help="relabel processes within teams (symmetry reduction)")
    p.add_argument("--no-prune", action="store_true", help="evaluate every complete assignment")
    p.add_argument("--repeats", type=_positive, default=1, help="allow each op up to this many times")
    p.set_defaults(func=cmd_discern)

    p = sub.add_parser("witness", parents=[common, register], help="print and verify the canonical witness")
    p.add_argument("--width", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--views", action="store_true", help="include view sets in JSON output")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("lemma", parents=[common], help="build a counterexample pair for a config")
    p.add_argument("lemma", choices=LEMMAS)
    p.add_argument("--config", required=True)
    p.add_argument("--sets", help="rllr subsets as A1;A2;B1;B2, e.g. '1;2;3;4'")
    p.set_defaults(func=cmd_lemma)

    for name, func, helptext in (
        ("consensus", cmd_consensus, "model-check the layered consensus protocol"),
        ("trace-replay", cmd_trace_replay, "replay one schedule of the protocol"),
    ):
        p = sub.add_parser(name, parents=[common, register], help=helptext)
        p.add_argument("--n", type=_positive, required=True)
        p.add_argument("--width", type=_positive, required=True)
        p.add_argument("--inputs", help="comma-separated input values (default 1..n)")
        p.add_argument("--invert", type=_positive, action="append",
                       help="flip the zero/nonzero test of this process (mutation check)")
        if name == "consensus":
            p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
            p.add_argument("--samples", type=_positive)
        else:
            p.add_argument("--schedule", type=_pid_list, help="process ids, e.g. 1,1,2,2")
            p.add_argument("--trace", help="trace file whose pid= fields give the schedule")
        p.set_defaults(func=func)

    p = sub.add_parser("table", parents=[common, register], help="consensus-number table over widths")
    p.add_argument("--widths", type=_width_range, default=range(1, 4), help="e.g. 1-3")
    p.add_argument("--max-n", type=_positive, default=8, help="largest n probed")
    p.add_argument("--fast", action="store_true")
    p.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ConfigError, OutOfRange, protocol.OutOfRange, checker.MalformedSchedule, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SearchBudgetExceeded, checker.BudgetExceeded) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
