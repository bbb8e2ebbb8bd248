"""Schedule exploration for protocol instances.

Agreement and validity are checked after every step, on partial schedules
too, so the first violation found comes with the trace that produced it.
Termination needs no search: programs are straight-line, so every process
finishes within its program length.
"""

from __future__ import annotations

import random
import sys
from itertools import permutations
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .protocol import Event, Protocol, ProtocolInstance


class MalformedSchedule(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, states: int, schedules: int) -> None:
        super().__init__(f"exploration budget exhausted after {states} states")
        self.states = states
        self.schedules = schedules


@dataclass
class Verdict:
    agreement: bool
    validity: bool
    schedules: int
    max_steps: int
    counterexample: list[str] | None = None
    sampled: bool = False
    states: int = 0
    seed: int | None = None

    @property
    def ok(self) -> bool:
        return self.agreement and self.validity

    def to_json(self) -> dict:
        out = {
            "agreement": self.agreement,
            "validity": self.validity,
            "max_steps": self.max_steps,
            "schedules": self.schedules,
            "counterexample": self.counterexample,
            "mode": "sampled" if self.sampled else "exhaustive",
            "states": self.states,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def _violation(inst: ProtocolInstance) -> tuple[bool, bool]:
    """(agreement, validity) over the processes decided so far."""
    values = inst.decided_values()
    agreement = all(v == values[0] for v in values)
    validity = all(v in inst.inputs for v in values)
    return agreement, validity


def run_schedule(protocol: Protocol, inputs, schedule: Sequence[int]):
    """Replay ``schedule`` from the initial state; returns ``(events, decisions)``.

    A prefix of a complete schedule is allowed.  Undecided processes show
    up as ``None`` in the decision vector.
    """
    inst = protocol.fresh(inputs)
    lengths = protocol.program_lengths()
    events: list[Event] = []
    for pos, pid in enumerate(schedule):
        if not isinstance(pid, int) or not 1 <= pid <= protocol.n:
            raise MalformedSchedule(f"position {pos}: no process {pid!r}")
        if inst.finished(pid):
            raise MalformedSchedule(f"position {pos}: process {pid} already ran all {lengths[pid - 1]} steps")
        events.append(inst.step(pid))
    decisions = [v if d else None for v, d in zip(inst.decisions, inst.decided)]
    return events, decisions


@dataclass
class _Search:
    memo: bool
    budget: int | None
    stop_at_first: bool
    seen: dict[tuple, tuple[int, bool, bool]] = field(default_factory=dict)
    states: int = 0
    max_steps: int = 0
    counterexample: list[Event] | None = None


class _Stop(Exception):
    pass


def explore_all_schedules(
    protocol: Protocol,
    inputs,
    *,
    budget: int | None = None,
    memo: bool = True,
    stop_at_first: bool = False,
) -> Verdict:
    """Depth-first search over every interleaving.

    Every schedule is explored even after a violation, so both flags
    describe the whole schedule space; the counterexample is the first
    violating trace in DFS order.  With ``memo`` each global state is
    expanded once and its subtree's schedule count and flags are cached,
    so ``schedules`` is the exact number of distinct complete schedules
    either way.
    """
    search = _Search(memo, budget, stop_at_first)
    root = protocol.fresh(inputs)
    lengths = protocol.program_lengths()
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * sum(lengths) + 100))

    def visit(inst: ProtocolInstance, trace: list[Event], flags: tuple[bool, bool]) -> tuple[int, bool, bool]:
        # flags: agreement and validity of the decisions made so far along this path
        if search.memo:
            key = inst.key()
            cached = search.seen.get(key)
            if cached is not None:
                return cached
        search.states += 1
        if search.budget is not None and search.states > search.budget:
            raise BudgetExceeded(search.states, 0)
        agreement, validity = flags
        if not (agreement and validity) and search.counterexample is None:
            search.counterexample = list(trace)
            if search.stop_at_first:
                raise _Stop
        enabled = inst.enabled()
        if not enabled:
            search.max_steps = max(search.max_steps, max(inst.pcs))
            result = (1, agreement, validity)
        else:
            count = 0
            for pid in enabled:
                child = inst.clone()
                event = child.step(pid)
                trace.append(event)
                sub_flags = _violation(child) if event.act == "decide" else flags
                sub_count, sub_agree, sub_valid = visit(child, trace, sub_flags)
                trace.pop()
                count += sub_count
                agreement &= sub_agree
                validity &= sub_valid
            result = (count, agreement, validity)
        if search.memo:
            search.seen[key] = result
        return result

    try:
        schedules, agreement, validity = visit(root, [], _violation(root))
    except _Stop:
        agreement, validity = _violation_of(protocol, inputs, search.counterexample)
        schedules = 0
    trace = None if search.counterexample is None else [e.format() for e in search.counterexample]
    return Verdict(agreement, validity, schedules, search.max_steps or max(lengths), trace, states=search.states)


def _violation_of(protocol: Protocol, inputs, trace: list[Event]) -> tuple[bool, bool]:
    inst = protocol.fresh(inputs)
    for event in trace:
        inst.step(event.pid)
    return _violation(inst)


def random_schedule(protocol: Protocol, inputs, rng: random.Random):
    """One complete schedule, choosing uniformly among unfinished processes at each step.

    Stops early at the first agreement or validity violation.
    """
    inst = protocol.fresh(inputs)
    trace: list[Event] = []
    while not inst.done():
        trace.append(inst.step(rng.choice(inst.enabled())))
        agreement, validity = _violation(inst)
        if not (agreement and validity):
            return trace, inst, (agreement, validity)
    return trace, inst, (True, True)


def random_schedules(protocol: Protocol, inputs, seed: int, count: int) -> Verdict:
    """Sample ``count`` schedules from ``random.Random(seed)`` (Mersenne Twister)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)
    max_steps = 0
    for done in range(1, count + 1):
        trace, inst, (agreement, validity) = random_schedule(protocol, inputs, rng)
        max_steps = max(max_steps, max(inst.pcs))
        if not (agreement and validity):
            return Verdict(agreement, validity, done, max_steps, [e.format() for e in trace],
                           sampled=True, seed=seed)
    return Verdict(True, True, count, max_steps, None, sampled=True, seed=seed)


def parse_trace_pids(lines) -> list[int]:
    """Process ids, in order, from trace lines ``step=.. pid=.. act=..``."""
    pids = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = dict(part.split("=", 1) for part in line.split() if "=" in part)
        if "pid" not in fields:
            raise MalformedSchedule(f"trace line without pid: {line!r}")
        try:
            pids.append(int(fields["pid"]))
        except ValueError:
            raise MalformedSchedule(f"bad pid in {line!r}") from None
    return pids


def input_vectors(n: int, values: Sequence[Hashable] | None = None):
    """All orderings of ``n`` distinct inputs plus one all-equal vector."""
    values = list(values) if values is not None else list(range(1, n + 1))
    out = [tuple(p) for p in permutations(values[:n])]
    out.append((values[0],) * n)
    return out
