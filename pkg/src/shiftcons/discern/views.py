"""Executions of a candidate configuration and the per-process view sets.

An execution is a tuple of process ids; each id contributes its single
update op.  Updates return nothing, so a process's view of an execution is
just the final object state, and ``R_A[j]`` is the set of final states over
executions that contain ``j`` and start with a team-A process.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Literal

from ..shiftreg import Word, apply_op
from .config import DiscernConfig

Execution = tuple[int, ...]
Team = Literal["A", "B"]


def replay(config: DiscernConfig, execution: Execution) -> Word:
    """Fold the execution's ops over ``q0``."""
    state = config.q0
    for pid in execution:
        state = apply_op(state, config.op(pid))
    return state


def _bounded_sequences(pids: list[int], budget: dict[int, int], prefix: list[int]) -> Iterator[Execution]:
    for pid in pids:
        if budget[pid]:
            budget[pid] -= 1
            prefix.append(pid)
            yield tuple(prefix)
            yield from _bounded_sequences(pids, budget, prefix)
            prefix.pop()
            budget[pid] += 1


def enumerate_executions(config: DiscernConfig, first_team: Team, repeats: int = 1) -> Iterator[Execution]:
    """Every nonempty execution whose first op belongs to ``first_team``.

    One-shot executions (``repeats=1``) come out by length, then
    lexicographically.  With ``repeats > 1`` each process may appear up to
    that many times, in depth-first order.
    """
    team = config.team_a if first_team == "A" else config.team_b
    pids = list(config.pids)
    if repeats == 1:
        for length in range(1, config.n + 1):
            for seq in permutations(pids, length):
                if seq[0] in team:
                    yield seq
        return
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    budget = {p: repeats for p in pids}
    for first in sorted(team):
        budget[first] -= 1
        yield (first,)
        yield from _bounded_sequences(pids, budget, [first])
        budget[first] += 1


@dataclass(frozen=True)
class ViewSets:
    r_a: dict[int, frozenset[Word]]
    r_b: dict[int, frozenset[Word]]

    def overlap(self, j: int) -> frozenset[Word]:
        return self.r_a[j] & self.r_b[j]

    def conflicts(self) -> dict[int, frozenset[Word]]:
        """Processes whose two view sets intersect, with the shared states."""
        out = {}
        for j in sorted(self.r_a):
            common = self.overlap(j)
            if common:
                out[j] = common
        return out

    def disjoint(self) -> bool:
        return not self.conflicts()

    def to_json(self) -> dict:
        def dump(sets):
            return {str(j): sorted(str(x) for x in sets[j]) for j in sorted(sets)}

        return {"R_A": dump(self.r_a), "R_B": dump(self.r_b), "disjoint": self.disjoint()}


def view_sets(config: DiscernConfig, repeats: int = 1) -> ViewSets:
    sets: dict[str, dict[int, set[Word]]] = {}
    for team in ("A", "B"):
        views: dict[int, set[Word]] = {j: set() for j in config.pids}
        for execution in enumerate_executions(config, team, repeats):
            final = replay(config, execution)
            for j in set(execution):
                views[j].add(final)
        sets[team] = views
    return ViewSets(
        {j: frozenset(s) for j, s in sets["A"].items()},
        {j: frozenset(s) for j, s in sets["B"].items()},
    )


def is_discerning_witness(config: DiscernConfig, repeats: int = 1) -> bool:
    return view_sets(config, repeats).disjoint()
