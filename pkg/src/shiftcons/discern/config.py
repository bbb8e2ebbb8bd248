"""Candidate discerning configurations and their line-oriented text format.

A config file looks like::

    # canonical 3-process witness
    width=3
    alphabet=2
    kind=logical
    q0=100
    team A = 1 2
    team B = 3
    op 1 = r^1
    op 2 = r^1
    op 3 = l^1

Blank lines and ``#`` comments are ignored; spacing around ``=`` is free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from ..shiftreg import ObjectKind, UpdateOp, Word


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DiscernConfig:
    """Initial state, two-team partition of processes ``1..n``, one update per process."""

    q0: Word
    team_a: frozenset[int]
    team_b: frozenset[int]
    ops: tuple[UpdateOp, ...]
    kind: ObjectKind = ObjectKind.LOGICAL
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "team_a", frozenset(self.team_a))
        object.__setattr__(self, "team_b", frozenset(self.team_b))
        object.__setattr__(self, "ops", tuple(self.ops))
        object.__setattr__(self, "kind", ObjectKind(self.kind))
        if not self.validate:
            return
        n = len(self.ops)
        if not self.team_a or not self.team_b:
            raise ConfigError("both teams must be nonempty")
        if self.team_a & self.team_b:
            raise ConfigError("teams must be disjoint")
        if self.team_a | self.team_b != frozenset(range(1, n + 1)):
            raise ConfigError(f"teams must cover processes 1..{n} exactly")
        for pid, op in enumerate(self.ops, 1):
            if not op.legal_for(self.kind):
                raise ConfigError(f"op {pid} = {op} is illegal on a {self.kind.value} register")
            if op.value is not None and (op.value.width != self.width or op.value.sigma != self.sigma):
                raise ConfigError(f"op {pid} writes a word of the wrong width or alphabet")

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def width(self) -> int:
        return self.q0.width

    @property
    def sigma(self) -> int:
        return self.q0.sigma

    @property
    def pids(self) -> range:
        return range(1, self.n + 1)

    def op(self, pid: int) -> UpdateOp:
        return self.ops[pid - 1]

    def team_of(self, pid: int) -> str:
        return "A" if pid in self.team_a else "B"

    def restrict(self, pids) -> DiscernConfig:
        """Sub-config on a subset of processes, renumbered ``1..m`` in id order.

        Teams may come out empty, so the result is unvalidated.
        """
        pids = sorted(pids)
        renum = {p: i for i, p in enumerate(pids, 1)}
        return DiscernConfig(
            self.q0,
            frozenset(renum[p] for p in pids if p in self.team_a),
            frozenset(renum[p] for p in pids if p in self.team_b),
            tuple(self.op(p) for p in pids),
            self.kind,
            validate=False,
        )

    def to_text(self) -> str:
        lines = [
            f"width={self.width}",
            f"alphabet={self.sigma}",
            f"kind={self.kind.value}",
            f"q0={self.q0}",
            "team A = " + " ".join(str(p) for p in sorted(self.team_a)),
            "team B = " + " ".join(str(p) for p in sorted(self.team_b)),
        ]
        lines += [f"op {pid} = {op}" for pid, op in enumerate(self.ops, 1)]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "alphabet": self.sigma,
            "kind": self.kind.value,
            "q0": str(self.q0),
            "team_a": sorted(self.team_a),
            "team_b": sorted(self.team_b),
            "ops": {str(pid): str(op) for pid, op in enumerate(self.ops, 1)},
        }


_KEY_RE = re.compile(r"^(width|alphabet|kind|q0)\s*=\s*(.+)$")
_TEAM_RE = re.compile(r"^team\s+([AB])\s*=\s*(.*)$", re.IGNORECASE)
_OP_RE = re.compile(r"^op\s+(\d+)\s*=\s*(.+)$")


def parse_config(text: str) -> DiscernConfig:
    values: dict[str, str] = {}
    teams: dict[str, list[int]] = {}
    raw_ops: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _KEY_RE.match(line):
            values[m.group(1)] = m.group(2).strip()
        elif m := _TEAM_RE.match(line):
            try:
                teams[m.group(1).upper()] = [int(t) for t in m.group(2).split()]
            except ValueError:
                raise ConfigError(f"line {lineno}: bad process id in {raw.strip()!r}") from None
        elif m := _OP_RE.match(line):
            raw_ops[int(m.group(1))] = m.group(2).strip()
        else:
            raise ConfigError(f"line {lineno}: cannot parse {raw.strip()!r}")

    if "q0" not in values:
        raise ConfigError("missing q0=")
    if set(teams) != {"A", "B"}:
        raise ConfigError("need both 'team A =' and 'team B =' lines")
    try:
        sigma = int(values.get("alphabet", "2"))
        kind = ObjectKind.parse(values.get("kind", "logical"))
        q0 = Word.parse(values["q0"], sigma)
        n = len(raw_ops)
        if sorted(raw_ops) != list(range(1, n + 1)):
            raise ConfigError(f"ops must be given for processes 1..{n}")
        ops = tuple(UpdateOp.parse(raw_ops[p], sigma) for p in range(1, n + 1))
        if "width" in values and int(values["width"]) != q0.width:
            raise ConfigError(f"width={values['width']} but q0 has width {q0.width}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return DiscernConfig(q0, frozenset(teams["A"]), frozenset(teams["B"]), ops, kind)


def load_config(path: str | Path) -> DiscernConfig:
    return parse_config(Path(path).read_text())
