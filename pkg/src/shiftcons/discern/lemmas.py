"""Refuters: concrete execution pairs showing a configuration is not discerning.

Each refuter builds two executions, one starting with team A and one with
team B, that share a process ``j`` and end in the same state, so
``R_A[j]`` and ``R_B[j]`` intersect.  Candidates are always replayed
before being returned; a refuter whose construction does not apply raises
:class:`NotApplicable`.

:func:`refute` chains them the way the width bound argument does: writes,
then same-direction pairs, then oversized or zero shifts, then two common
prefix sums of the team shift amounts.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..shiftreg import OpVariant, Word
from .config import DiscernConfig
from .views import Execution, replay


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class Counterexample:
    exec_a: Execution
    exec_b: Execution
    final_state: Word
    overlap: int
    lemma: str = ""

    def check(self, config: DiscernConfig) -> None:
        """Replay both executions and assert every invariant of a genuine overlap."""
        for execution, team in ((self.exec_a, config.team_a), (self.exec_b, config.team_b)):
            assert execution, "empty execution"
            assert len(set(execution)) == len(execution), f"{execution} repeats a process"
            assert execution[0] in team, f"{execution} starts on the wrong team"
            assert self.overlap in execution, f"{execution} misses process {self.overlap}"
            assert replay(config, execution) == self.final_state, f"{execution} does not end in {self.final_state}"

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "exec_a": list(self.exec_a),
            "exec_b": list(self.exec_b),
            "final_state": str(self.final_state),
            "overlap": self.overlap,
        }


def _oriented(config: DiscernConfig, first: Execution, second: Execution, overlap: int, lemma: str) -> Counterexample:
    """Place the A-first execution in ``exec_a`` and verify by replay."""
    if first[0] in config.team_b:
        first, second = second, first
    if first[0] not in config.team_a or second[0] not in config.team_b:
        raise NotApplicable(f"{lemma}: executions do not start on opposite teams")
    end_a, end_b = replay(config, first), replay(config, second)
    if end_a != end_b:
        raise NotApplicable(f"{lemma}: executions end in {end_a} and {end_b}")
    cex = Counterexample(first, second, end_a, overlap, lemma)
    cex.check(config)
    return cex


def _other_team(config: DiscernConfig, pid: int) -> frozenset[int]:
    return config.team_b if pid in config.team_a else config.team_a


def refute_writes(config: DiscernConfig) -> Counterexample:
    """A write erases whatever ran before it: ``q0 p' p == q0 p``."""
    writers = [p for p in config.pids if config.op(p).variant is OpVariant.WRITE]
    if not writers:
        raise NotApplicable("no-writes: config has no write op")
    i = writers[0]
    partner = min(_other_team(config, i))
    return _oriented(config, (partner, i), (i,), i, "no-writes")


def _same_direction(a, b) -> bool:
    return a.is_shift and b.is_shift and a.variant is b.variant


def refute_same_direction(config: DiscernConfig) -> Counterexample:
    """Two same-variant shifts on opposite teams commute."""
    for i in sorted(config.team_a):
        for j in sorted(config.team_b):
            if _same_direction(config.op(i), config.op(j)):
                return _oriented(config, (i, j), (j, i), i, "direction")
    raise NotApplicable("direction: no same-direction pair across the teams")


def refute_shift_sizes(config: DiscernConfig) -> Counterexample:
    """Zero shifts are invisible; a team shifting ``>= w`` in total erases the word either way."""
    for i in config.pids:
        op = config.op(i)
        if op.is_shift and op.k == 0:
            partner = min(_other_team(config, i))
            return _oriented(config, (i, partner), (partner,), partner, "sizes")
    for team in (config.team_a, config.team_b):
        members = sorted(team)
        ops = [config.op(p) for p in members]
        if not all(op.is_shift for op in ops):
            continue
        if len({op.variant for op in ops}) != 1 or sum(op.k for op in ops) < config.width:
            continue
        partner = min(config.team_b if team is config.team_a else config.team_a)
        run = tuple(members)
        try:
            return _oriented(config, run, (partner,) + run, members[0], "sizes")
        except NotApplicable:
            continue
    raise NotApplicable("sizes: no zero shift and no team shifting the full width")


def _run(ids) -> Execution:
    return tuple(sorted(ids))


def refute_rllr(config: DiscernConfig, a1, a2, b1, b2) -> Counterexample:
    """Masking ``k`` digits at one end and ``k'`` at the other, in either order."""
    a1, a2, b1, b2 = (frozenset(s) for s in (a1, a2, b1, b2))
    if not all((a1, a2, b1, b2)):
        raise NotApplicable("rllr: subsets must be nonempty")
    if a1 & a2 or b1 & b2 or not (a1 | a2) <= config.team_a or not (b1 | b2) <= config.team_b:
        raise NotApplicable("rllr: need disjoint A1, A2 within A and B1, B2 within B")
    ops = [config.op(p) for p in a1 | a2 | b1 | b2]
    if not all(op.is_shift for op in ops):
        raise NotApplicable("rllr: every op involved must be a shift")

    def k(ids):
        return sum(config.op(p).k for p in ids)

    if k(a1) != k(b1) or k(a2) != k(b2):
        raise NotApplicable(f"rllr: shift sums differ ({k(a1)} vs {k(b1)}, {k(a2)} vs {k(b2)})")
    first = _run(a1) + _run(b1) + _run(b2) + _run(a2)
    second = _run(b2) + _run(a2) + _run(a1) + _run(b1)
    return _oriented(config, first, second, min(a1), "rllr")


@dataclass(frozen=True)
class Overlap:
    """Positions (1-based, into the two k-lists) of the blocks with matching sums."""

    a1: frozenset[int]
    a2: frozenset[int]
    b1: frozenset[int]
    b2: frozenset[int]


def _prefix_sums(ks: list[int]) -> list[int]:
    out, total = [], 0
    for k in ks:
        total += k
        out.append(total)
    return out


def partial_sum_overlap(k_a: list[int], k_b: list[int], w: int) -> Overlap | None:
    """Two shared prefix sums of ``k_a`` and ``k_b``, cut into matching blocks.

    With every entry >= 1 and both totals <= ``w - 1``, all prefix sums
    lie in ``1..w-1``, so ``len(k_a) + len(k_b) >= w + 1`` forces at least
    two shared values.  Returns ``None`` when fewer than two are shared.
    """
    if w < 1:
        raise ValueError("width must be >= 1")
    if any(k < 1 for k in k_a) or any(k < 1 for k in k_b):
        raise ValueError("shift amounts must be >= 1")
    left, right = _prefix_sums(k_a), _prefix_sums(k_b)
    shared = sorted(set(left) & set(right))
    if len(shared) < 2:
        return None
    lo, hi = shared[0], shared[1]
    a, a2 = left.index(lo) + 1, left.index(hi) + 1
    b, b2 = right.index(lo) + 1, right.index(hi) + 1
    return Overlap(
        frozenset(range(1, a + 1)),
        frozenset(range(a + 1, a2 + 1)),
        frozenset(range(1, b + 1)),
        frozenset(range(b + 1, b2 + 1)),
    )


def rllr_sets(config: DiscernConfig):
    """Process-id subsets ``(A1, A2, B1, B2)`` found from the teams' shift amounts, or ``None``."""
    team_a, team_b = sorted(config.team_a), sorted(config.team_b)
    ops = [config.op(p) for p in team_a + team_b]
    if not all(op.is_shift and op.k >= 1 for op in ops):
        return None
    found = partial_sum_overlap(
        [config.op(p).k for p in team_a], [config.op(p).k for p in team_b], config.width
    )
    if found is None:
        return None

    def ids(team, positions):
        return frozenset(team[i - 1] for i in positions)

    return ids(team_a, found.a1), ids(team_a, found.a2), ids(team_b, found.b1), ids(team_b, found.b2)


LEMMAS = ("no-writes", "direction", "sizes", "rllr")


def refute_by(lemma: str, config: DiscernConfig, sets=None) -> Counterexample:
    if lemma == "no-writes":
        return refute_writes(config)
    if lemma == "direction":
        return refute_same_direction(config)
    if lemma == "sizes":
        return refute_shift_sizes(config)
    if lemma == "rllr":
        if sets is None:
            sets = rllr_sets(config)
            if sets is None:
                raise NotApplicable("rllr: team shift amounts share fewer than two prefix sums")
        return refute_rllr(config, *sets)
    raise ValueError(f"unknown lemma {lemma!r}; expected one of {', '.join(LEMMAS)}")


def refute(config: DiscernConfig) -> Counterexample:
    """First refuter in the chain that applies; raises :class:`NotApplicable` if none does."""
    for lemma in LEMMAS:
        try:
            return refute_by(lemma, config)
        except NotApplicable:
            continue
    raise NotApplicable("no refuter applies to this config")
