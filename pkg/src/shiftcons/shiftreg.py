"""Width-w shift registers over a small integer alphabet.

Words are immutable digit tuples stored most-significant first, so
``Word((1, 0, 0))`` is the register ``x2 x1 x0 = 100``.  Symbol 0 is the
null symbol that shifts feed in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator


class ShiftRegisterError(ValueError):
    pass


class IllegalVariant(ShiftRegisterError):
    """An update the object's kind does not support (e.g. ``s`` on a logical register)."""


class WidthMismatch(ShiftRegisterError):
    """A written word whose width or alphabet differs from the object's."""


class ObjectKind(str, enum.Enum):
    LOGICAL = "logical"
    ARITHMETIC = "arithmetic"

    @classmethod
    def parse(cls, text: str) -> ObjectKind:
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown object kind {text!r}") from None


@dataclass(frozen=True)
class Alphabet:
    size: int = 2

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ValueError("alphabet needs a null symbol and at least one non-null symbol")

    def __contains__(self, symbol: object) -> bool:
        return isinstance(symbol, int) and 0 <= symbol < self.size


@dataclass(frozen=True, order=True)
class Word:
    digits: tuple[int, ...]
    sigma: int = 2
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "digits", tuple(self.digits))
        if not self.digits:
            raise ValueError("a word has width >= 1")
        if self.sigma < 2:
            raise ValueError("alphabet size must be >= 2")
        for d in self.digits:
            if not (isinstance(d, int) and 0 <= d < self.sigma):
                raise ValueError(f"digit {d!r} outside alphabet 0..{self.sigma - 1}")
        object.__setattr__(self, "_hash", hash((self.digits, self.sigma)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def width(self) -> int:
        return len(self.digits)

    @property
    def msd(self) -> int:
        return self.digits[0]

    def digit(self, i: int) -> int:
        """Digit ``x_i`` with 0 the least significant position."""
        return self.digits[self.width - 1 - i]

    def is_zero(self) -> bool:
        return not any(self.digits)

    @property
    def index(self) -> int:
        """Base-sigma value of the word; lexicographic order on words of one width."""
        value = 0
        for d in self.digits:
            value = value * self.sigma + d
        return value

    @classmethod
    def from_index(cls, index: int, width: int, sigma: int = 2) -> Word:
        if not 0 <= index < sigma**width:
            raise ValueError(f"index {index} out of range for width {width}")
        digits = []
        for _ in range(width):
            index, d = divmod(index, sigma)
            digits.append(d)
        return cls(tuple(reversed(digits)), sigma)

    @classmethod
    def zero(cls, width: int, sigma: int = 2) -> Word:
        return cls((0,) * width, sigma)

    @classmethod
    def one_then_zeros(cls, width: int, sigma: int = 2) -> Word:
        """``1 0^(w-1)``: a single non-null symbol in the top position."""
        return cls((1,) + (0,) * (width - 1), sigma)

    @classmethod
    def parse(cls, text: str, sigma: int = 2) -> Word:
        text = text.strip()
        if sigma > 10 or "," in text:
            parts = [p.strip() for p in text.split(",")]
        else:
            parts = list(text)
        try:
            digits = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"cannot parse word {text!r}") from None
        return cls(digits, sigma)

    def __str__(self) -> str:
        if self.sigma <= 10:
            return "".join(str(d) for d in self.digits)
        return ",".join(str(d) for d in self.digits)


def all_words(width: int, sigma: int = 2) -> Iterator[Word]:
    """Every word of the given width in lexicographic order."""
    for digits in product(range(sigma), repeat=width):
        yield Word(digits, sigma)


def _check_amount(k: int) -> None:
    # k == 0 is the identity; only the degenerate-op helpers produce it.
    if k < 0:
        raise ValueError(f"shift amount must be non-negative, got {k}")


def lshift(x: Word, k: int) -> Word:
    _check_amount(k)
    w = x.width
    if k >= w:
        return Word.zero(w, x.sigma)
    return Word(x.digits[k:] + (0,) * k, x.sigma)


def rshift_logical(x: Word, k: int) -> Word:
    _check_amount(k)
    w = x.width
    if k >= w:
        return Word.zero(w, x.sigma)
    return Word((0,) * k + x.digits[: w - k], x.sigma)


def rshift_arith(x: Word, k: int) -> Word:
    _check_amount(k)
    w = x.width
    k = min(k, w)
    return Word((x.msd,) * k + x.digits[: w - k], x.sigma)


class OpVariant(str, enum.Enum):
    LSHIFT = "l"
    RSHIFT_LOGICAL = "r"
    RSHIFT_ARITH = "s"
    WRITE = "w"


_SHIFTS = {
    OpVariant.LSHIFT: lshift,
    OpVariant.RSHIFT_LOGICAL: rshift_logical,
    OpVariant.RSHIFT_ARITH: rshift_arith,
}


@dataclass(frozen=True)
class UpdateOp:
    """One update operation: ``l^k``, ``r^k``, ``s^k`` or ``w(v)``."""

    variant: OpVariant
    k: int = 0
    value: Word | None = None

    def __post_init__(self) -> None:
        if self.variant is OpVariant.WRITE:
            if self.value is None:
                raise ValueError("write op needs a value")
        elif self.k < 1:
            raise ValueError(f"shift amount must be >= 1, got {self.k}")

    @classmethod
    def l(cls, k: int = 1) -> UpdateOp:  # noqa: E743
        return cls(OpVariant.LSHIFT, k)

    @classmethod
    def r(cls, k: int = 1) -> UpdateOp:
        return cls(OpVariant.RSHIFT_LOGICAL, k)

    @classmethod
    def s(cls, k: int = 1) -> UpdateOp:
        return cls(OpVariant.RSHIFT_ARITH, k)

    @classmethod
    def write(cls, value: Word) -> UpdateOp:
        return cls(OpVariant.WRITE, 0, value)

    @classmethod
    def zero_shift(cls, variant: OpVariant) -> UpdateOp:
        """A degenerate 0-position shift (the identity), for exercising refuters only."""
        if variant is OpVariant.WRITE:
            raise ValueError("zero_shift needs a shift variant")
        op = object.__new__(cls)
        object.__setattr__(op, "variant", variant)
        object.__setattr__(op, "k", 0)
        object.__setattr__(op, "value", None)
        return op

    @property
    def is_shift(self) -> bool:
        return self.variant is not OpVariant.WRITE

    @property
    def is_left(self) -> bool:
        return self.variant is OpVariant.LSHIFT

    @property
    def is_right(self) -> bool:
        return self.variant in (OpVariant.RSHIFT_LOGICAL, OpVariant.RSHIFT_ARITH)

    def legal_for(self, kind: ObjectKind) -> bool:
        if kind is ObjectKind.LOGICAL:
            return self.variant is not OpVariant.RSHIFT_ARITH
        return self.variant is not OpVariant.RSHIFT_LOGICAL

    def __str__(self) -> str:
        if self.variant is OpVariant.WRITE:
            return f"w({self.value})"
        return f"{self.variant.value}^{self.k}"

    @classmethod
    def parse(cls, text: str, sigma: int = 2) -> UpdateOp:
        text = text.strip()
        if text.startswith("w(") and text.endswith(")"):
            return cls.write(Word.parse(text[2:-1], sigma))
        head, sep, amount = text.partition("^")
        try:
            variant = OpVariant(head)
        except ValueError:
            variant = None
        if variant is None or variant is OpVariant.WRITE:
            raise ValueError(f"cannot parse update op {text!r}")
        if not sep:
            return cls(variant, 1)
        try:
            return cls(variant, int(amount))
        except ValueError:
            raise ValueError(f"cannot parse update op {text!r}") from None


def apply_op(x: Word, op: UpdateOp) -> Word:
    """Pure result of applying ``op`` to ``x``."""
    if op.variant is OpVariant.WRITE:
        v = op.value
        if v.width != x.width or v.sigma != x.sigma:
            raise WidthMismatch(f"cannot write {v} (w={v.width}, sigma={v.sigma}) "
                                f"into a w={x.width}, sigma={x.sigma} register")
        return v
    return _SHIFTS[op.variant](x, op.k)


def canonicalize(op: UpdateOp, w: int) -> UpdateOp:
    """Cap a shift amount at the width; ``l^k == l^w`` for every ``k >= w``."""
    if not op.is_shift:
        raise ValueError("only shift ops can be canonicalized")
    if op.k <= w:
        return op
    return UpdateOp(op.variant, w)


class ShiftObject:
    """Mutable shift register holding one :class:`Word`.

    Not synchronized; simulations drive it from a single thread.
    """

    __slots__ = ("kind", "state")

    def __init__(self, kind: ObjectKind, state: Word) -> None:
        self.kind = kind if isinstance(kind, ObjectKind) else ObjectKind(kind)
        self.state = state

    def copy(self) -> ShiftObject:
        return ShiftObject(self.kind, self.state)

    def apply(self, op: UpdateOp) -> None:
        if not op.legal_for(self.kind):
            raise IllegalVariant(f"{op} is not an update of a {self.kind.value} shift register")
        self.state = apply_op(self.state, op)

    def read(self) -> Word:
        return self.state

    def __repr__(self) -> str:
        return f"ShiftObject({self.kind.value}, {self.state})"
