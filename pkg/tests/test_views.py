import random
from itertools import product

import pytest

from oracles import executions_reverse_order, fold, is_witness_oracle
from shiftcons.discern import (
    ConfigError,
    DiscernConfig,
    enumerate_executions,
    is_discerning_witness,
    load_config,
    parse_config,
    replay,
    view_sets,
)
from shiftcons.discern.search import op_universe
from shiftcons.shiftreg import ObjectKind, UpdateOp, Word, all_words

W = Word.parse
L, A = ObjectKind.LOGICAL, ObjectKind.ARITHMETIC


def cfg(q0, team_a, ops, kind=L):
    n = len(ops)
    return DiscernConfig(W(q0), frozenset(team_a), frozenset(range(1, n + 1)) - set(team_a),
                         tuple(UpdateOp.parse(o) if isinstance(o, str) else o for o in ops), kind)


class TestEnumeration:
    def test_two_processes(self):
        c = cfg("10", {1}, ["r^1", "l^1"])
        assert list(enumerate_executions(c, "A")) == [(1,), (1, 2)]
        assert list(enumerate_executions(c, "B")) == [(2,), (2, 1)]

    def test_three_processes_team_a(self):
        c = cfg("100", {1, 2}, ["r^1", "r^1", "l^1"])
        got = list(enumerate_executions(c, "A"))
        expected = {(1,), (2,), (1, 2), (2, 1), (1, 3), (2, 3), (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1)}
        assert len(got) == 10 and set(got) == expected

    @pytest.mark.parametrize("n", range(2, 6))
    def test_both_teams_cover_all_one_shot_sequences(self, n):
        c = cfg("1" + "0" * 3, set(range(1, n)), ["s^1"] * (n - 1) + ["l^1"], A)
        got = list(enumerate_executions(c, "A")) + list(enumerate_executions(c, "B"))
        assert len(got) == len(set(got))
        assert set(got) == set(executions_reverse_order(n))

    def test_repeats(self):
        c = cfg("10", {1}, ["r^1", "l^1"])
        got = list(enumerate_executions(c, "A", repeats=2)) + list(enumerate_executions(c, "B", repeats=2))
        assert len(got) == len(set(got))
        assert set(got) == set(executions_reverse_order(2, repeats=2))
        with pytest.raises(ValueError):
            list(enumerate_executions(c, "A", repeats=0))


class TestViewSets:
    def test_two_process_example(self):
        # (1) -> 01, (1,2) -> 01 l = 10, (2) -> 00, (2,1) -> 00
        vs = view_sets(cfg("10", {1}, ["r^1", "l^1"]))
        assert vs.r_a[1] == {W("01"), W("10")}
        assert vs.r_a[2] == {W("10")}
        assert vs.r_b[1] == {W("00")}
        assert vs.r_b[2] == {W("00")}
        assert vs.disjoint()

    def test_write_of_q0_collides(self):
        c = cfg("10", {1}, [UpdateOp.write(W("10")), "l^1"])
        assert replay(c, (2, 1)) == replay(c, (1,))
        assert not is_discerning_witness(c)
        assert W("10") in view_sets(c).overlap(1)

    def test_width_one_has_few_states(self):
        for ops in product(op_universe(1, 2, L), repeat=2):
            vs = view_sets(DiscernConfig(W("1"), {1}, {2}, ops, L))
            for j in (1, 2):
                assert len(vs.r_a[j] | vs.r_b[j]) <= 2

    def test_canonical_witnesses(self):
        assert is_discerning_witness(cfg("10", {1}, ["r^1", "l^1"]))
        assert is_discerning_witness(cfg("10", {1, 2, 3}, ["s^1"] * 3 + ["l^1"], A))

    def test_any_write_defeats(self):
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(2, 4)
            universe = op_universe(2, 2, L)
            ops = [rng.choice(universe) for _ in range(n)]
            ops[rng.randrange(n)] = UpdateOp.write(rng.choice(list(all_words(2))))
            mask = rng.randrange(1, (1 << n) - 1)
            team_a = {i + 1 for i in range(n) if mask >> i & 1}
            c = DiscernConfig(rng.choice(list(all_words(2))), team_a, set(range(1, n + 1)) - team_a, ops, L)
            assert not is_discerning_witness(c)

    def test_json(self):
        out = view_sets(cfg("10", {1}, ["r^1", "l^1"])).to_json()
        assert out["disjoint"] is True
        assert sorted(out["R_A"]["1"]) == ["01", "10"]


def _all_configs(w, n, kind, sigma=2):
    universe = op_universe(w, sigma, kind)
    for q0 in all_words(w, sigma):
        for mask in range(1, (1 << n) - 1):
            team_a = {i + 1 for i in range(n) if mask >> i & 1}
            for ops in product(universe, repeat=n):
                yield DiscernConfig(q0, team_a, set(range(1, n + 1)) - team_a, ops, kind)


class TestOracleConsistency:
    @pytest.mark.parametrize("kind", [L, A])
    @pytest.mark.parametrize("w, n", [(1, 2), (1, 3), (2, 2), (2, 3)])
    def test_exhaustive_small(self, w, n, kind):
        for c in _all_configs(w, n, kind):
            assert is_discerning_witness(c) == is_witness_oracle(c), c.to_text()

    @pytest.mark.parametrize("kind", [L, A])
    def test_random_n4_w3(self, kind):
        rng = random.Random(11)
        universe = op_universe(3, 2, kind)
        # bias towards shifts so that witnesses actually appear in the sample
        shifts = [op for op in universe if op.is_shift]
        hits = 0
        for _ in range(400):
            ops = [rng.choice(shifts if rng.random() < 0.9 else universe) for _ in range(4)]
            mask = rng.randrange(1, 15)
            team_a = {i + 1 for i in range(4) if mask >> i & 1}
            c = DiscernConfig(rng.choice(list(all_words(3))), team_a, {1, 2, 3, 4} - team_a, ops, kind)
            got = is_discerning_witness(c)
            assert got == is_witness_oracle(c), c.to_text()
            hits += got
        # logical width 3 admits no four-process witness at all
        assert (hits > 0) == (kind is A)

    def test_final_states_match_oracle_fold(self):
        c = cfg("1011", {1, 3}, ["r^1", "l^2", "r^2", "l^1"])
        for seq in executions_reverse_order(4):
            assert replay(c, seq) == fold(c.q0, c.ops, seq)

    def test_repeats_against_oracle(self):
        rng = random.Random(3)
        universe = op_universe(2, 2, L)
        for _ in range(60):
            ops = [rng.choice(universe) for _ in range(3)]
            c = DiscernConfig(rng.choice(list(all_words(2))), {1}, {2, 3}, ops, L)
            assert is_discerning_witness(c, repeats=2) == is_witness_oracle(c, repeats=2)


class TestConfigFormat:
    TEXT = """
    # canonical three-process witness
    width=3
    alphabet=2
    kind=logical
    q0=100
    team A = 1 2
    team B = 3
    op 1 = r^1
    op 2 = r^1
    op 3 = l^1
    """

    def test_parse(self):
        c = parse_config(self.TEXT)
        assert c == cfg("100", {1, 2}, ["r^1", "r^1", "l^1"])

    def test_round_trip(self, tmp_path):
        c = cfg("1011", {2, 4}, ["r^1", "l^2", UpdateOp.write(W("0110")), "l^4"])
        assert parse_config(c.to_text()) == c
        path = tmp_path / "c.txt"
        path.write_text(c.to_text())
        assert load_config(path) == c

    @pytest.mark.parametrize(
        "text",
        [
            "width=2\nq0=10\nteam A = 1\nteam B = 1\nop 1 = r^1",
            "width=2\nq0=10\nteam A = 1\nteam B = 2\nop 1 = r^1",
            "width=2\nkind=logical\nq0=10\nteam A = 1\nteam B = 2\nop 1 = s^1\nop 2 = l^1",
            "width=2\nq0=102\nteam A = 1\nteam B = 2\nop 1 = r^1\nop 2 = l^1",
            "width=2\nq0=10\nteam A = 1\nteam B = 2\nop 1 = r^1\nop 2 = w(101)",
            "width=2\nq0=10\nteam A = 1\nteam B = 2\nop 1 = r^1\nop 2 = l^1\nbogus line",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_teams_must_partition(self):
        with pytest.raises(ConfigError):
            DiscernConfig(W("10"), {1}, set(), (UpdateOp.r(),), L)
