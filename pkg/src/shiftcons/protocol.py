"""Wait-free consensus from shift registers by layered team consensus.

Layer ``L`` (``2 <= L <= n``) runs two-team consensus among processes
``1..L``: team A is ``1..L-1``, team B is ``{L}``.  Its shift object starts
at ``1 0^(w-1)``; each A member writes its candidate to ``regA`` and
right-shifts once, process ``L`` writes its input to ``regB`` and
left-shifts once.  Every process then reads the object and adopts ``regA``
if the state is nonzero, ``regB`` otherwise.  If an A op comes first the
object stays nonzero forever after, if the B op comes first it stays zero
(for logical registers this needs ``L - 1 <= w - 1`` right shifts).

Process ``i`` enters at layer ``max(i, 2)``: as team B with its own input
in layer ``i``, then as team A in every higher layer with the value it
adopted one layer down.  All of ``1..L-1`` leave layer ``L-1`` with the
same value, so every write to ``regA`` of layer ``L`` carries one value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any, Hashable, Union

from .shiftreg import ObjectKind, ShiftObject, UpdateOp, Word


class OutOfRange(ValueError):
    pass


class AlreadyDone(RuntimeError):
    pass


class RegisterConflict(AssertionError):
    """Two different values written to a register every writer should agree on."""


class ClassificationChanged(AssertionError):
    """A layer object flipped between zero and nonzero after its first op."""


class Team(str, enum.Enum):
    A = "A"
    B = "B"


def classify_state(x: Word) -> Team:
    return Team.B if x.is_zero() else Team.A


# ---------------------------------------------------------------------------
# Program steps
# ---------------------------------------------------------------------------

INPUT = "input"


@dataclass(frozen=True)
class WriteRegister:
    slot: int
    source: str


@dataclass(frozen=True)
class ApplyObject:
    obj: int
    op: UpdateOp


@dataclass(frozen=True)
class ReadObject:
    obj: int
    into: str


@dataclass(frozen=True)
class ReadRegister:
    """Read ``if_nonzero`` or ``if_zero`` depending on the object state held in ``test``.

    The only branch in a program.  ``invert`` flips the test (mutation testing).
    """

    test: str
    if_nonzero: int
    if_zero: int
    into: str
    invert: bool = False


@dataclass(frozen=True)
class Decide:
    source: str


Step = Union[WriteRegister, ApplyObject, ReadObject, ReadRegister, Decide]

_ACT = {
    WriteRegister: "write",
    ApplyObject: "apply",
    ReadObject: "read_obj",
    ReadRegister: "read_reg",
    Decide: "decide",
}


@dataclass(frozen=True)
class Protocol:
    n: int
    w: int
    kind: ObjectKind
    programs: tuple[tuple[Step, ...], ...]
    object_init: tuple[Word, ...]
    register_names: tuple[str, ...]

    def program(self, pid: int) -> tuple[Step, ...]:
        return self.programs[pid - 1]

    @property
    def pids(self) -> range:
        return range(1, self.n + 1)

    def program_lengths(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.programs)

    def fresh(self, inputs) -> ProtocolInstance:
        return ProtocolInstance.start(self, inputs)


def _check_range(n: int, w: int, kind: ObjectKind) -> None:
    if kind is ObjectKind.LOGICAL and n > w:
        raise OutOfRange(f"logical layers need n <= w (n={n}, w={w})")
    if kind is ObjectKind.ARITHMETIC and w < 2 and n >= 2:
        raise OutOfRange("arithmetic layers need w >= 2")


def _layer_steps(layer: int, obj: int, pid: int, source: str, kind: ObjectKind) -> list[Step]:
    reg_a, reg_b = 2 * obj, 2 * obj + 1
    if pid == layer:
        writes, op = reg_b, UpdateOp.l()
    else:
        writes, op = reg_a, UpdateOp.r() if kind is ObjectKind.LOGICAL else UpdateOp.s()
    seen = f"obj{layer}"
    return [
        WriteRegister(writes, source),
        ApplyObject(obj, op),
        ReadObject(obj, seen),
        ReadRegister(seen, reg_a, reg_b, f"v{layer}"),
    ]


def _assemble(n: int, w: int, kind: ObjectKind, layers: range, sources) -> Protocol:
    programs = []
    for pid in range(1, n + 1):
        steps: list[Step] = []
        last = INPUT
        for layer in layers:
            if pid > layer:
                continue
            steps += _layer_steps(layer, layer - layers.start, pid, sources(pid, layer, last), kind)
            last = f"v{layer}"
        steps.append(Decide(last))
        programs.append(tuple(steps))
    names = []
    for layer in layers:
        names += [f"regA{layer}", f"regB{layer}"]
    return Protocol(
        n,
        w,
        kind,
        tuple(programs),
        tuple(Word.one_then_zeros(w) for _ in layers),
        tuple(names),
    )


def build_team_consensus(n: int, kind: ObjectKind, w: int) -> Protocol:
    """A single layer over ``n`` processes; A members write their own inputs to ``regA``.

    Consensus among all ``n`` holds only when team A's inputs already agree;
    :func:`build_consensus` arranges that by recursion.
    """
    kind = ObjectKind(kind)
    if n < 2:
        raise OutOfRange("a team layer needs n >= 2")
    _check_range(n, w, kind)
    return _assemble(n, w, kind, range(n, n + 1), lambda pid, layer, last: INPUT)


def build_consensus(n: int, w: int, kind: ObjectKind, *, unchecked: bool = False) -> Protocol:
    """Layers ``2..n``; ``unchecked`` skips the width check (to watch a too-narrow layer fail)."""
    kind = ObjectKind(kind)
    if n < 1:
        raise OutOfRange("need n >= 1")
    if not unchecked:
        _check_range(n, w, kind)
    return _assemble(n, w, kind, range(2, n + 1), lambda pid, layer, last: last)


def invert_classification(protocol: Protocol, pid: int) -> Protocol:
    """Copy of ``protocol`` where ``pid`` reads the wrong register in its last layer."""
    program = list(protocol.program(pid))
    for idx in range(len(program) - 1, -1, -1):
        if isinstance(program[idx], ReadRegister):
            program[idx] = replace(program[idx], invert=not program[idx].invert)
            break
    else:
        raise ValueError(f"process {pid} never branches")
    programs = list(protocol.programs)
    programs[pid - 1] = tuple(program)
    return replace(protocol, programs=tuple(programs))


def check_write_before_op(protocol: Protocol) -> None:
    """Every object op is preceded, in the same program, by a write to one of that layer's registers."""
    for pid in protocol.pids:
        written: set[int] = set()
        for step in protocol.program(pid):
            if isinstance(step, WriteRegister):
                written.add(step.slot)
            elif isinstance(step, ApplyObject):
                if not written & {2 * step.obj, 2 * step.obj + 1}:
                    raise AssertionError(f"process {pid} applies to object {step.obj} before writing its register")


# ---------------------------------------------------------------------------
# Runtime
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    step: int
    pid: int
    act: str
    obj: int | None = None
    state: Word | None = None
    val: Any = None

    def format(self) -> str:
        def show(v):
            return "-" if v is None else str(v)

        return (f"step={self.step} pid={self.pid} act={self.act} obj={show(self.obj)} "
                f"state={show(self.state)} val={show(self.val)}")


@dataclass
class ProtocolInstance:
    protocol: Protocol
    inputs: tuple[Hashable, ...]
    registers: list[Hashable | None]
    objects: list[ShiftObject]
    pcs: list[int]
    locals: list[dict[str, Any]]
    decisions: list[Hashable | None]
    decided: list[bool]
    # zero/nonzero class of each object after its first op, None before
    first_class: list[Team | None]
    steps_taken: int = 0
    check_stability: bool = field(default=True, repr=False)
    # clones share locals dicts and objects; step() copies whatever it mutates
    _local_keys: list[int] = field(default_factory=list, repr=False)
    # locals snapshot -> small int, shared by every clone of one start()
    _interned: dict[tuple, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self._local_keys:
            self._local_keys = [self._intern(d) for d in self.locals]

    def _intern(self, local: dict[str, Any]) -> int:
        # insertion order is fixed by the PC, so items() is canonical
        snapshot = tuple(local.items())
        return self._interned.setdefault(snapshot, len(self._interned))

    @classmethod
    def start(cls, protocol: Protocol, inputs) -> ProtocolInstance:
        inputs = tuple(inputs)
        if len(inputs) != protocol.n:
            raise ValueError(f"need {protocol.n} inputs, got {len(inputs)}")
        return cls(
            protocol,
            inputs,
            [None] * len(protocol.register_names),
            [ShiftObject(protocol.kind, x) for x in protocol.object_init],
            [0] * protocol.n,
            [{INPUT: v} for v in inputs],
            [None] * protocol.n,
            [False] * protocol.n,
            [None] * len(protocol.object_init),
        )

    def clone(self) -> ProtocolInstance:
        return ProtocolInstance(
            self.protocol,
            self.inputs,
            list(self.registers),
            list(self.objects),
            list(self.pcs),
            list(self.locals),
            list(self.decisions),
            list(self.decided),
            list(self.first_class),
            self.steps_taken,
            self.check_stability,
            list(self._local_keys),
            self._interned,
        )

    def key(self) -> tuple:
        """Full global state: registers, objects, PCs, locals, decisions."""
        return (
            tuple(self.registers),
            tuple(o.state for o in self.objects),
            tuple(self.pcs),
            tuple(self._local_keys),
            tuple(self.decisions),
            tuple(self.decided),
            tuple(self.first_class),
        )

    def finished(self, pid: int) -> bool:
        return self.pcs[pid - 1] >= len(self.protocol.programs[pid - 1])

    def enabled(self) -> list[int]:
        return [p for p in self.protocol.pids if not self.finished(p)]

    def done(self) -> bool:
        return not self.enabled()

    def decided_values(self) -> list[Hashable | None]:
        return [v for v, d in zip(self.decisions, self.decided) if d]

    def step(self, pid: int) -> Event:
        if not 1 <= pid <= self.protocol.n:
            raise ValueError(f"no process {pid}")
        if self.finished(pid):
            raise AlreadyDone(f"process {pid} has finished its program")
        idx = pid - 1
        instr = self.protocol.programs[idx][self.pcs[idx]]
        local = self.locals[idx]
        self.steps_taken += 1
        obj = state = value = None

        if isinstance(instr, WriteRegister):
            value = local[instr.source]
            held = self.registers[instr.slot]
            if held is not None and held != value:
                raise RegisterConflict(
                    f"{self.protocol.register_names[instr.slot]} holds {held!r}, process {pid} writes {value!r}")
            self.registers[instr.slot] = value
        elif isinstance(instr, ApplyObject):
            obj = instr.obj
            target = self.objects[obj] = self.objects[obj].copy()
            target.apply(instr.op)
            state = target.state
            self._track(obj)
        elif isinstance(instr, ReadObject):
            obj = instr.obj
            state = self.objects[obj].read()
            self._set_local(idx, instr.into, state)
        elif isinstance(instr, ReadRegister):
            nonzero = classify_state(local[instr.test]) is Team.A
            if instr.invert:
                nonzero = not nonzero
            value = self.registers[instr.if_nonzero if nonzero else instr.if_zero]
            self._set_local(idx, instr.into, value)
        else:
            if self.decided[idx]:
                raise AssertionError(f"process {pid} decides twice")
            value = self.decisions[idx] = local[instr.source]
            self.decided[idx] = True
        self.pcs[idx] += 1
        return Event(self.steps_taken, pid, _ACT[type(instr)], obj, state, value)

    def _set_local(self, idx: int, name: str, value: Any) -> None:
        local = self.locals[idx] = dict(self.locals[idx])
        local[name] = value
        self._local_keys[idx] = self._intern(local)

    def _track(self, obj: int) -> None:
        now = classify_state(self.objects[obj].state)
        first = self.first_class[obj]
        if first is None:
            self.first_class[obj] = now
        elif self.check_stability and first is not now:
            raise ClassificationChanged(f"object {obj} moved from {first.value} to {now.value}")
