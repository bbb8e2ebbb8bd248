import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import shift_by_positions
from shiftcons.shiftreg import (
    IllegalVariant,
    ObjectKind,
    OpVariant,
    ShiftObject,
    UpdateOp,
    WidthMismatch,
    Word,
    all_words,
    apply_op,
    canonicalize,
    lshift,
    rshift_arith,
    rshift_logical,
)

W = Word.parse


@st.composite
def words(draw, max_width=8, max_sigma=4):
    sigma = draw(st.integers(2, max_sigma))
    width = draw(st.integers(1, max_width))
    digits = draw(st.lists(st.integers(0, sigma - 1), min_size=width, max_size=width))
    return Word(tuple(digits), sigma)


@pytest.mark.parametrize(
    "fn, x, k, expected",
    [
        (lshift, "101", 1, "010"),
        (lshift, "10", 1, "00"),
        (lshift, "111", 5, "000"),
        (rshift_logical, "101", 1, "010"),
        (rshift_logical, "10", 1, "01"),
        (rshift_logical, "01", 2, "00"),
        (rshift_arith, "100", 2, "111"),
        (rshift_arith, "101", 1, "110"),
        (rshift_arith, "011", 1, "001"),
    ],
)
def test_shift_examples(fn, x, k, expected):
    assert str(fn(W(x), k)) == expected


@pytest.mark.parametrize(
    "op, w, expected",
    [
        (UpdateOp.l(9), 3, UpdateOp.l(3)),
        (UpdateOp.s(5), 2, UpdateOp.s(2)),
        (UpdateOp.r(1), 4, UpdateOp.r(1)),
    ],
)
def test_canonicalize_examples(op, w, expected):
    assert canonicalize(op, w) == expected


def test_canonicalize_rejects_write():
    with pytest.raises(ValueError):
        canonicalize(UpdateOp.write(W("01")), 2)


_VARIANTS = [OpVariant.LSHIFT, OpVariant.RSHIFT_LOGICAL, OpVariant.RSHIFT_ARITH]


@given(words(), st.sampled_from(_VARIANTS), st.integers(1, 12))
def test_shifts_match_positional_definition(x, variant, k):
    assert apply_op(x, UpdateOp(variant, k)) == shift_by_positions(x, variant, k)


@given(words(), st.sampled_from(_VARIANTS), st.integers(1, 12))
def test_width_and_alphabet_preserved(x, variant, k):
    y = apply_op(x, UpdateOp(variant, k))
    assert y.width == x.width and y.sigma == x.sigma


def test_non_inversion_found_for_every_width():
    for w in range(1, 9):
        witnesses = [x for x in all_words(w) if lshift(rshift_logical(x, 1), 1) != x]
        assert witnesses, w


def test_shift_amount_must_be_positive():
    with pytest.raises(ValueError):
        UpdateOp.l(0)
    with pytest.raises(ValueError):
        lshift(W("10"), -1)
    assert UpdateOp.zero_shift(OpVariant.LSHIFT).k == 0


class TestShiftObject:
    def test_apply_examples(self):
        obj = ShiftObject(ObjectKind.LOGICAL, W("10"))
        obj.apply(UpdateOp.l())
        assert str(obj.read()) == "00"

        obj = ShiftObject(ObjectKind.ARITHMETIC, W("00"))
        obj.apply(UpdateOp.s())
        assert str(obj.read()) == "00"

        obj = ShiftObject(ObjectKind.LOGICAL, W("01"))
        obj.apply(UpdateOp.write(W("11")))
        assert str(obj.read()) == "11"

    def test_read_has_no_effect(self):
        obj = ShiftObject(ObjectKind.LOGICAL, W("10"))
        assert obj.read() == obj.read() == W("10")
        zero = ShiftObject(ObjectKind.LOGICAL, Word.zero(4))
        assert zero.read() == Word.zero(4)

    def test_read_after_write(self):
        obj = ShiftObject(ObjectKind.ARITHMETIC, W("11"))
        obj.apply(UpdateOp.write(W("01")))
        assert str(obj.read()) == "01"

    def test_illegal_variants(self):
        with pytest.raises(IllegalVariant):
            ShiftObject(ObjectKind.LOGICAL, W("10")).apply(UpdateOp.s())
        with pytest.raises(IllegalVariant):
            ShiftObject(ObjectKind.ARITHMETIC, W("10")).apply(UpdateOp.r())

    def test_width_mismatch(self):
        obj = ShiftObject(ObjectKind.LOGICAL, W("10"))
        with pytest.raises(WidthMismatch):
            obj.apply(UpdateOp.write(W("101")))
        with pytest.raises(WidthMismatch):
            obj.apply(UpdateOp.write(Word((0, 2), 3)))
        assert obj.read() == W("10")


class TestTextForms:
    @pytest.mark.parametrize("text", ["l^1", "r^3", "s^2", "w(10)", "w(0)"])
    def test_op_round_trip(self, text):
        assert str(UpdateOp.parse(text)) == text

    def test_bare_variant_means_one(self):
        assert UpdateOp.parse("l") == UpdateOp.l(1)

    @pytest.mark.parametrize("bad", ["x^1", "l^", "l^0", "w(", "w(12)", "w^2"])
    def test_bad_ops(self, bad):
        with pytest.raises(ValueError):
            UpdateOp.parse(bad)

    def test_large_alphabet_uses_commas(self):
        x = Word((11, 0, 3), 12)
        assert str(x) == "11,0,3"
        assert Word.parse("11,0,3", 12) == x
        assert str(UpdateOp.write(x)) == "w(11,0,3)"

    @given(words())
    def test_word_round_trip(self, x):
        assert Word.parse(str(x), x.sigma) == x

    @given(words())
    def test_index_round_trip(self, x):
        assert Word.from_index(x.index, x.width, x.sigma) == x

    def test_index_order_is_lexicographic(self):
        ws = list(all_words(3, 3))
        assert [x.index for x in ws] == list(range(27))
        assert ws == sorted(ws)

    def test_invalid_digits(self):
        with pytest.raises(ValueError):
            Word((0, 2))
        with pytest.raises(ValueError):
            Word(())


def test_random_ops_agree_with_oracle_wide_alphabet():
    rng = random.Random(2024)
    for _ in range(300):
        sigma = rng.randint(2, 16)
        x = Word(tuple(rng.randrange(sigma) for _ in range(rng.randint(1, 10))), sigma)
        variant = rng.choice(_VARIANTS)
        k = rng.randint(1, 14)
        assert apply_op(x, UpdateOp(variant, k)) == shift_by_positions(x, variant, k)


_SHIFT_FNS = [lshift, rshift_logical, rshift_arith]


@given(words(), st.sampled_from(_SHIFT_FNS), st.integers(1, 10), st.integers(1, 10))
def test_composition(x, fn, a, b):
    assert fn(fn(x, a), b) == fn(x, a + b)


@given(words(), st.sampled_from(_VARIANTS), st.integers(1, 20))
def test_zero_absorption(x, variant, k):
    zero = Word.zero(x.width, x.sigma)
    assert apply_op(zero, UpdateOp(variant, k)) == zero


@given(words())
def test_arithmetic_saturation(x):
    y = x
    for _ in range(x.width):
        y = rshift_arith(y, 1)
    assert y == Word((x.msd,) * x.width, x.sigma)


@given(words(), st.sampled_from(_VARIANTS), st.integers(1, 20))
def test_canonicalize_equivalence(x, variant, k):
    op = UpdateOp(variant, k)
    assert apply_op(x, canonicalize(op, x.width)) == apply_op(x, op)
    assert canonicalize(op, x.width).k == min(k, x.width)
