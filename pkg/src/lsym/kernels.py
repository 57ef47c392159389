"""Selects the compiled word kernels when available, else the pure-Python ones.

Set ``LSYM_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("LSYM_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

IMPL: str = _impl.IMPL
MASK = _impl.MASK
ADD, SUB, MUL, MOD, EQ, LT, LE, GE, AND, OR, XOR = range(11)

wrap = _impl.wrap
binop = _impl.binop
cond = _impl.cond
splitmix64 = _impl.splitmix64
xorshift_fill = _impl.xorshift_fill
split_words = _impl.split_words
combine_words = _impl.combine_words
add_words = _impl.add_words
sub_words = _impl.sub_words
xor_words = _impl.xor_words

OP_CODES = {
    "add": ADD, "sub": SUB, "mul": MUL, "mod": MOD, "eq": EQ, "lt": LT,
    "le": LE, "ge": GE, "and": AND, "or": OR, "xor": XOR,
}


def apply_op(op: str, a: int, b: int) -> int:
    """The integer meaning of a binary operator name."""
    return binop(OP_CODES[op], a, b)


def to_unsigned(x: int) -> int:
    return x & MASK
