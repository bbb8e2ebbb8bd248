from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_interleavings, multinomial
from shiftcons.checker import (
    BudgetExceeded,
    MalformedSchedule,
    explore_all_schedules,
    input_vectors,
    parse_trace_pids,
    random_schedules,
    run_schedule,
)
from shiftcons.protocol import build_consensus, build_team_consensus, invert_classification
from shiftcons.shiftreg import ObjectKind

L, A = ObjectKind.LOGICAL, ObjectKind.ARITHMETIC


def schedule_space_by_replay(protocol, inputs):
    """(count, agreement, validity) by running every interleaving from scratch."""
    count, agree, valid = 0, True, True
    for sched in all_interleavings(protocol.program_lengths()):
        _, decisions = run_schedule(protocol, inputs, sched)
        count += 1
        agree &= len(set(decisions)) == 1
        valid &= all(d in inputs for d in decisions)
    return count, agree, valid


class TestCounts:
    def test_two_processes(self):
        v = explore_all_schedules(build_consensus(2, 2, L), (1, 2))
        assert v.schedules == 252 == multinomial((5, 5))
        assert v.ok and v.counterexample is None
        assert v.max_steps == 5

    def test_three_processes_multinomial(self):
        p = build_consensus(3, 3, L)
        v = explore_all_schedules(p, (1, 2, 3))
        assert v.schedules == multinomial(p.program_lengths()) == 1636014380
        assert v.max_steps == 9

    @pytest.mark.parametrize("kind, w", [(L, 2), (A, 2), (L, 3)])
    @pytest.mark.parametrize("inputs", [(1, 2), (2, 1), (4, 4)])
    def test_matches_replaying_every_schedule(self, kind, w, inputs):
        p = build_consensus(2, w, kind)
        v = explore_all_schedules(p, inputs)
        assert (v.schedules, v.agreement, v.validity) == schedule_space_by_replay(p, inputs)

    def test_mutant_matches_replay(self):
        p = invert_classification(build_consensus(2, 2, L), 1)
        v = explore_all_schedules(p, (1, 2))
        assert (v.schedules, v.agreement, v.validity) == schedule_space_by_replay(p, (1, 2))

    @pytest.mark.parametrize("mutate", [None, 1, 2])
    def test_memo_is_sound(self, mutate):
        p = build_consensus(2, 2, A)
        if mutate:
            p = invert_classification(p, mutate)
        with_memo = explore_all_schedules(p, (1, 2))
        without = explore_all_schedules(p, (1, 2), memo=False)
        assert with_memo.to_json() | {"states": 0} == without.to_json() | {"states": 0}
        assert with_memo.states < without.states

    def test_team_layer_three_processes(self):
        p = build_team_consensus(3, A, 2)
        v = explore_all_schedules(p, (1, 1, 2))
        assert v.ok and v.schedules == multinomial(p.program_lengths())


class TestMutation:
    @pytest.mark.parametrize("pid", [1, 2])
    def test_inverted_reader_disagrees(self, pid):
        p = invert_classification(build_consensus(2, 2, L), pid)
        v = explore_all_schedules(p, (1, 2))
        assert not v.agreement
        assert v.counterexample
        sched = parse_trace_pids(v.counterexample)
        events, decisions = run_schedule(p, (1, 2), sched)
        assert [e.format() for e in events] == v.counterexample
        inst = p.fresh((1, 2))
        for pid in sched:
            inst.step(pid)
        decided = inst.decided_values()
        assert len(set(decided)) > 1 or any(d not in (1, 2) for d in decided)

    def test_stop_at_first(self):
        p = invert_classification(build_consensus(2, 2, L), 1)
        full = explore_all_schedules(p, (1, 2))
        quick = explore_all_schedules(p, (1, 2), stop_at_first=True)
        assert quick.counterexample == full.counterexample
        assert quick.states <= full.states

    def test_disagreement_on_real_inputs(self):
        # process 2 empties the object first, the mutant then reads regA instead of regB
        p = invert_classification(build_consensus(2, 2, L), 1)
        _, decisions = run_schedule(p, (1, 2), [2] * 5 + [1] * 5)
        assert decisions == [1, 2]

    def test_mutant_reads_unwritten_register(self):
        p = invert_classification(build_consensus(2, 2, L), 1)
        _, decisions = run_schedule(p, (3, 3), [1] * 5)
        assert decisions == [None, None]
        assert not explore_all_schedules(p, (3, 3)).validity


class TestRandom:
    def test_deterministic(self):
        p = build_consensus(4, 2, A)
        a = random_schedules(p, (1, 2, 3, 4), seed=9, count=50)
        b = random_schedules(p, (1, 2, 3, 4), seed=9, count=50)
        assert a == b and a.ok and a.sampled and a.seed == 9
        assert a.to_json()["mode"] == "sampled"

    def test_finds_mutation(self):
        p = invert_classification(build_consensus(2, 2, L), 2)
        v = random_schedules(p, (1, 2), seed=0, count=500)
        assert not v.ok and v.counterexample

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            random_schedules(build_consensus(2, 2, L), (1, 2), seed=0, count=0)


class TestSchedules:
    def test_prefix(self):
        events, decisions = run_schedule(build_consensus(2, 2, L), (1, 2), [2, 2])
        assert len(events) == 2 and decisions == [None, None]

    @pytest.mark.parametrize("sched", [[0], [3], [1, "x"], [1] * 6])
    def test_malformed(self, sched):
        with pytest.raises(MalformedSchedule):
            run_schedule(build_consensus(2, 2, L), (1, 2), sched)

    def test_trace_parsing(self):
        lines = ["# comment", "", "step=1 pid=2 act=write obj=- state=- val=2", "step=2 pid=1 act=apply"]
        assert parse_trace_pids(lines) == [2, 1]
        with pytest.raises(MalformedSchedule):
            parse_trace_pids(["step=1 act=write"])
        with pytest.raises(MalformedSchedule):
            parse_trace_pids(["step=1 pid=a"])

    @settings(max_examples=50)
    @given(st.data())
    def test_trace_round_trip(self, data):
        p = build_consensus(3, 3, L)
        lengths = list(p.program_lengths())
        sched = []
        while any(lengths):
            pid = data.draw(st.sampled_from([i + 1 for i, n in enumerate(lengths) if n]))
            lengths[pid - 1] -= 1
            sched.append(pid)
        events, decisions = run_schedule(p, (4, 5, 6), sched)
        assert parse_trace_pids(e.format() for e in events) == sched
        assert len(set(decisions)) == 1 and decisions[0] in (4, 5, 6)


def test_budget():
    with pytest.raises(BudgetExceeded):
        explore_all_schedules(build_consensus(3, 3, L), (1, 2, 3), budget=100)


def test_input_vectors():
    vecs = input_vectors(3)
    assert len(vecs) == 7 and vecs[-1] == (1, 1, 1)
    assert all(len(set(v)) == 3 for v in vecs[:-1])
    assert input_vectors(2, ["a", "b"]) == [("a", "b"), ("b", "a"), ("a", "a")]


def test_json_keys():
    out = explore_all_schedules(build_consensus(2, 2, L), (1, 2)).to_json()
    assert {"agreement", "validity", "max_steps", "schedules", "counterexample"} <= set(out)
    assert out["mode"] == "exhaustive"


def test_every_pair_of_distinct_inputs_agrees():
    p = build_consensus(2, 2, A)
    for x, y in combinations(range(4), 2):
        assert explore_all_schedules(p, (x, y)).ok
