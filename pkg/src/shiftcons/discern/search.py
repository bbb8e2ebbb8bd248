"""Exhaustive search for discerning configurations.

The search walks ``q0`` in lexicographic order, then team partitions by
bitmask (bit ``i-1`` set puts process ``i`` in team A, masks ascending),
then op assignments lexicographically over :func:`op_universe`, process 1
most significant.  The first witness in that order is reported.

Op assignments are built process by process.  A prefix ``1..m`` whose view
sets already intersect is cut off: executions of the sub-config are also
executions of every extension, so the intersection survives.  This pruning
keeps the lexicographic order intact; ``prune=False`` switches it off.

Each candidate is evaluated on integer state indices with a dynamic
program over the multiset of ops used (a bitmask for one-shot
executions), instead of the explicit enumeration in :mod:`.views`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

from ..shiftreg import ObjectKind, UpdateOp, Word, all_words, apply_op
from .config import DiscernConfig


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, nodes: int) -> None:
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


class OutOfRange(ValueError):
    pass


def op_universe(w: int, sigma: int, kind: ObjectKind) -> list[UpdateOp]:
    """Canonical update ops: ``l^1..l^w``, then ``r^1..r^w`` (or ``s``), then every write."""
    kind = ObjectKind(kind)
    right = UpdateOp.r if kind is ObjectKind.LOGICAL else UpdateOp.s
    ops = [UpdateOp.l(k) for k in range(1, w + 1)]
    ops += [right(k) for k in range(1, w + 1)]
    ops += [UpdateOp.write(v) for v in all_words(w, sigma)]
    return ops


def canonical_witness(w: int, n: int, kind: ObjectKind, sigma: int = 2) -> DiscernConfig:
    """``q0 = 1 0^(w-1)``; processes ``1..n-1`` right-shift once, process ``n`` left-shifts once."""
    kind = ObjectKind(kind)
    if n < 2:
        raise OutOfRange(f"need n >= 2, got {n}")
    if kind is ObjectKind.LOGICAL and n > w:
        raise OutOfRange(f"a width-{w} logical register is not {n}-discerning")
    if kind is ObjectKind.ARITHMETIC and w < 2:
        raise OutOfRange("arithmetic witness needs width >= 2")
    right = UpdateOp.r() if kind is ObjectKind.LOGICAL else UpdateOp.s()
    return DiscernConfig(
        Word.one_then_zeros(w, sigma),
        frozenset(range(1, n)),
        frozenset({n}),
        (right,) * (n - 1) + (UpdateOp.l(),),
        kind,
    )


class _Evaluator:
    """Conflict test for candidate configs on indexed states of one (w, sigma, universe)."""

    def __init__(self, w: int, sigma: int, universe: list[UpdateOp], repeats: int = 1) -> None:
        words = list(all_words(w, sigma))
        self.trans = [tuple(apply_op(x, op).index for x in words) for op in universe]
        self.repeats = repeats
        self._images: dict[tuple[int, int], int] = {}

    def image(self, op: int, states: int) -> int:
        key = (op, states)
        hit = self._images.get(key)
        if hit is not None:
            return hit
        table = self.trans[op]
        out = 0
        s = states
        while s:
            low = s & -s
            out |= 1 << table[low.bit_length() - 1]
            s ^= low
        self._images[key] = out
        return out

    def conflicts(self, q0: int, in_a: tuple[bool, ...], ops: tuple[int, ...]) -> bool:
        if self.repeats == 1:
            return self._conflicts_one_shot(q0, in_a, ops)
        return self._conflicts_bounded(q0, in_a, ops)

    def _conflicts_one_shot(self, q0, in_a, ops) -> bool:
        m = len(ops)
        full = 1 << m
        reach = ([0] * full, [0] * full)  # reachable final states, indexed [team][subset]
        for i, op in enumerate(ops):
            reach[0 if in_a[i] else 1][1 << i] = 1 << self.trans[op][q0]
        view_a = [0] * m
        view_b = [0] * m
        for mask in range(1, full):
            if mask & (mask - 1):
                for team in (0, 1):
                    acc = 0
                    table = reach[team]
                    for i in range(m):
                        bit = 1 << i
                        if mask & bit:
                            prev = table[mask ^ bit]
                            if prev:
                                acc |= self.image(ops[i], prev)
                    table[mask] = acc
            sa = reach[0][mask]
            sb = reach[1][mask]
            for i in range(m):
                if mask >> i & 1:
                    view_a[i] |= sa
                    view_b[i] |= sb
        return any(a & b for a, b in zip(view_a, view_b))

    def _conflicts_bounded(self, q0, in_a, ops) -> bool:
        m = len(ops)
        counts_by_size = sorted(product(range(self.repeats + 1), repeat=m), key=sum)
        reach = ({}, {})
        view_a = [0] * m
        view_b = [0] * m
        for counts in counts_by_size:
            size = sum(counts)
            if size == 0:
                continue
            for team in (0, 1):
                table = reach[team]
                if size == 1:
                    i = counts.index(1)
                    acc = 1 << self.trans[ops[i]][q0] if (team == 0) == in_a[i] else 0
                else:
                    acc = 0
                    for i in range(m):
                        if counts[i]:
                            prev = table[counts[:i] + (counts[i] - 1,) + counts[i + 1:]]
                            if prev:
                                acc |= self.image(ops[i], prev)
                table[counts] = acc
            for i in range(m):
                if counts[i]:
                    view_a[i] |= reach[0][counts]
                    view_b[i] |= reach[1][counts]
        return any(a & b for a, b in zip(view_a, view_b))


class _PrefixViews:
    """One-shot reach and view tables grown one process at a time along the DFS.

    Pushing process ``pos`` fills in exactly the subsets whose highest
    member is ``pos``; smaller subsets were filled by earlier pushes and stay valid.
    """

    def __init__(self, evaluator: _Evaluator, q0: int, in_a: tuple[bool, ...]) -> None:
        n = len(in_a)
        self.ev = evaluator
        self.q0 = q0
        self.in_a = in_a
        self.reach_a = [0] * (1 << n)
        self.reach_b = [0] * (1 << n)
        self.members = [tuple(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
        self.views = [([0] * n, [0] * n)]

    def push(self, pos: int, ops: list[int]) -> bool:
        """Add process ``pos`` with ``ops[pos]``; report whether any view sets now intersect."""
        image = self.ev.image
        ra, rb = self.reach_a, self.reach_b
        va, vb = (list(v) for v in self.views[pos])
        base = 1 << pos
        single = 1 << self.ev.trans[ops[pos]][self.q0]
        ra[base], rb[base] = (single, 0) if self.in_a[pos] else (0, single)
        for mask in range(base, base << 1):
            members = self.members[mask]
            if mask != base:
                acc_a = acc_b = 0
                for i in members:
                    prev = mask ^ (1 << i)
                    if ra[prev]:
                        acc_a |= image(ops[i], ra[prev])
                    if rb[prev]:
                        acc_b |= image(ops[i], rb[prev])
                ra[mask] = acc_a
                rb[mask] = acc_b
            sa, sb = ra[mask], rb[mask]
            for i in members:
                va[i] |= sa
                vb[i] |= sb
        del self.views[pos + 1:]
        self.views.append((va, vb))
        return any(a & b for a, b in zip(va, vb))


@dataclass(frozen=True)
class SearchResult:
    discerning: bool
    witness: DiscernConfig | None
    nodes: int

    def __bool__(self) -> bool:
        return self.discerning


@dataclass(frozen=True)
class _Branch:
    w: int
    sigma: int
    n: int
    kind: ObjectKind
    q0: int
    mask: int
    prune: bool
    fast: bool
    repeats: int


def _search_branch(branch: _Branch, budget: int | None, evaluator: _Evaluator | None = None):
    """Depth-first search over op assignments for one ``(q0, partition)``.

    Returns ``(op indices or None, nodes)``; raises when ``budget`` nodes are used up.
    """
    universe = op_universe(branch.w, branch.sigma, branch.kind)
    if evaluator is None:
        evaluator = _Evaluator(branch.w, branch.sigma, universe, branch.repeats)
    n = branch.n
    in_a = tuple(bool(branch.mask >> i & 1) for i in range(n))
    choices = range(len(universe))
    nodes = 0
    assigned: list[int] = []
    prefix_views = _PrefixViews(evaluator, branch.q0, in_a) if branch.repeats == 1 else None

    def dfs(pos: int) -> bool:
        nonlocal nodes
        lo = 0
        if branch.fast:
            # processes within a team are interchangeable: keep their ops non-decreasing
            for prev in range(pos - 1, -1, -1):
                if in_a[prev] == in_a[pos]:
                    lo = assigned[prev]
                    break
        for op in choices[lo:]:
            nodes += 1
            if budget is not None and nodes > budget:
                raise SearchBudgetExceeded(nodes)
            assigned.append(op)
            prefix = in_a[: pos + 1]
            last = pos == n - 1
            check = (last or branch.prune) and any(prefix) and not all(prefix)
            if prefix_views is not None:
                # tables are grown at every depth, checked or not
                clash = prefix_views.push(pos, assigned)
            else:
                clash = check and evaluator.conflicts(branch.q0, prefix, tuple(assigned))
            if check and clash:
                assigned.pop()
                continue
            if last or dfs(pos + 1):
                return True
            assigned.pop()
        return False

    found = dfs(0)
    return (tuple(assigned) if found else None), nodes


def _branches(w, sigma, n, kind, prune, fast, repeats):
    if fast:
        masks = [(1 << a) - 1 for a in range(1, n)]
    else:
        masks = list(range(1, (1 << n) - 1))
    for q0 in range(sigma**w):
        for mask in masks:
            yield _Branch(w, sigma, n, kind, q0, mask, prune, fast, repeats)


def _run_branch(args):
    branch, budget = args
    try:
        return _search_branch(branch, budget)
    except SearchBudgetExceeded as exc:
        return None, exc.nodes


def _to_config(branch: _Branch, ops: tuple[int, ...]) -> DiscernConfig:
    universe = op_universe(branch.w, branch.sigma, branch.kind)
    return DiscernConfig(
        Word.from_index(branch.q0, branch.w, branch.sigma),
        frozenset(i + 1 for i in range(branch.n) if branch.mask >> i & 1),
        frozenset(i + 1 for i in range(branch.n) if not branch.mask >> i & 1),
        tuple(universe[i] for i in ops),
        branch.kind,
    )


def decide_discerning(
    w: int,
    sigma: int,
    n: int,
    kind: ObjectKind,
    *,
    budget: int | None = None,
    prune: bool = True,
    fast: bool = False,
    repeats: int = 1,
    jobs: int = 1,
) -> SearchResult:
    """Decide by exhaustive search whether a width-``w`` register is ``n``-discerning.

    ``fast`` adds symmetry reduction (processes relabeled within a team,
    team A always ``{1..a}``); the default is the plain full product.
    With ``jobs > 1`` branches are evaluated in worker processes and reduced
    in search order, so the witness and node count match a sequential run.
    """
    kind = ObjectKind(kind)
    if w < 1 or sigma < 2 or n < 2:
        raise ValueError("need w >= 1, sigma >= 2, n >= 2")
    branches = _branches(w, sigma, n, kind, prune, fast, repeats)
    total = 0

    def settle(branch, ops, nodes):
        nonlocal total
        total += nodes
        if budget is not None and total > budget:
            raise SearchBudgetExceeded(total)
        if ops is not None:
            return SearchResult(True, _to_config(branch, ops), total)
        return None

    if jobs > 1:
        branches = list(branches)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_run_branch, [(b, budget) for b in branches], chunksize=4)
            for branch, (ops, nodes) in zip(branches, results):
                if (done := settle(branch, ops, nodes)) is not None:
                    return done
        return SearchResult(False, None, total)

    evaluator = _Evaluator(w, sigma, op_universe(w, sigma, kind), repeats)
    for branch in branches:
        remaining = None if budget is None else budget - total
        try:
            ops, nodes = _search_branch(branch, remaining, evaluator)
        except SearchBudgetExceeded as exc:
            raise SearchBudgetExceeded(total + exc.nodes) from None
        if (done := settle(branch, ops, nodes)) is not None:
            return done
    return SearchResult(False, None, total)


@dataclass(frozen=True)
class ConsensusProbe:
    """Outcome of scanning ``n = 2, 3, ...`` for one width."""

    width: int
    kind: ObjectKind
    max_discerning_n: int
    first_non_discerning_n: int | None
    nodes: int

    @property
    def label(self) -> str:
        if self.first_non_discerning_n is None:
            return f">={self.max_discerning_n}"
        return str(self.max_discerning_n)


def probe_consensus_number(
    w: int, kind: ObjectKind, sigma: int = 2, max_n: int = 8, **search_kw
) -> ConsensusProbe:
    """Largest ``n <= max_n`` with the register ``n``-discerning, scanning until the first failure.

    A register that is not 2-discerning still solves 1-process consensus,
    so the floor is 1.
    """
    kind = ObjectKind(kind)
    budget = search_kw.pop("budget", None)
    best = 1
    nodes = 0
    for n in range(2, max_n + 1):
        remaining = None if budget is None else budget - nodes
        try:
            result = decide_discerning(w, sigma, n, kind, budget=remaining, **search_kw)
        except SearchBudgetExceeded as exc:
            raise SearchBudgetExceeded(nodes + exc.nodes) from None
        nodes += result.nodes
        if not result.discerning:
            return ConsensusProbe(w, kind, best, n, nodes)
        best = n
    return ConsensusProbe(w, kind, best, None, nodes)
