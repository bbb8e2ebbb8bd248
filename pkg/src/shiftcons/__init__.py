"""Shift-register shared objects, discernibility search, and a model-checked consensus protocol."""

from .shiftreg import (
    Alphabet,
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

__version__ = "0.1.0"
