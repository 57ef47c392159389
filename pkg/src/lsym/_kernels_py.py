"""Pure-Python word kernels: 64-bit integer operators, PRG streams, share arithmetic.

The compiled twin in ``_kernels_c.pyx`` must agree with this module bit for bit.
"""
from __future__ import annotations

MASK = (1 << 64) - 1
SIGN = 1 << 63

# operator codes shared with the compiled module
ADD, SUB, MUL, MOD, EQ, LT, LE, GE, AND, OR, XOR = range(11)

XS_MULT = 0x2545F4914F6CDD1D
SM_GAMMA = 0x9E3779B97F4A7C15
SM_M1 = 0xBF58476D1CE4E5B9
SM_M2 = 0x94D049BB133111EB

IMPL = "python"


def wrap(x: int) -> int:
    x &= MASK
    return x - (1 << 64) if x & SIGN else x


def binop(code: int, a: int, b: int) -> int:
    if code == ADD:
        return wrap(a + b)
    if code == SUB:
        return wrap(a - b)
    if code == MUL:
        return wrap(a * b)
    if code == MOD:
        if b == 0:
            return a
        if b == -1:
            return 0
        r = abs(a) % abs(b)
        return -r if a < 0 else r
    if code == EQ:
        return 1 if a == b else 0
    if code == LT:
        return 1 if a < b else 0
    if code == LE:
        return 1 if a <= b else 0
    if code == GE:
        return 1 if a >= b else 0
    if code == AND:
        return 1 if (a != 0 and b != 0) else 0
    if code == OR:
        return 1 if (a != 0 or b != 0) else 0
    if code == XOR:
        return a ^ b
    raise ValueError(f"unknown operator code {code}")


def cond(c: int, a: int, b: int) -> int:
    return a if c != 0 else b


def splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step: returns (next_state, output)."""
    x = (x + SM_GAMMA) & MASK
    z = x
    z = ((z ^ (z >> 30)) * SM_M1) & MASK
    z = ((z ^ (z >> 27)) * SM_M2) & MASK
    return x, z ^ (z >> 31)


def xorshift_fill(state: int, n: int) -> tuple[int, list[int]]:
    """Draw n words from xorshift64* starting at a non-zero state."""
    out = []
    x = state & MASK
    for _ in range(n):
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        out.append((x * XS_MULT) & MASK)
    return x, out


def split_words(value: int, randoms: list[int], xor: bool) -> list[int]:
    """Shares for ``len(randoms) + 1`` owners; the last share closes the identity."""
    v = value & MASK
    shares = [r & MASK for r in randoms]
    if xor:
        acc = 0
        for s in shares:
            acc ^= s
        shares.append(v ^ acc)
    else:
        acc = 0
        for s in shares:
            acc += s
        shares.append((v - acc) & MASK)
    return shares


def combine_words(words: list[int], xor: bool) -> int:
    acc = 0
    if xor:
        for w in words:
            acc ^= w
        return acc & MASK
    for w in words:
        acc += w
    return acc & MASK


def add_words(a: list[int], b: list[int]) -> list[int]:
    return [(x + y) & MASK for x, y in zip(a, b)]


def sub_words(a: list[int], b: list[int]) -> list[int]:
    return [(x - y) & MASK for x, y in zip(a, b)]


def xor_words(a: list[int], b: list[int]) -> list[int]:
    return [x ^ y for x, y in zip(a, b)]
