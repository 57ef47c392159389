# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled word kernels. Mirrors lsym._kernels_py exactly."""

from libc.stdint cimport uint64_t, int64_t

MASK = (1 << 64) - 1

ADD, SUB, MUL, MOD, EQ, LT, LE, GE, AND, OR, XOR = range(11)

cdef uint64_t XS_MULT = 0x2545F4914F6CDD1DULL
cdef uint64_t SM_GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t SM_M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t SM_M2 = 0x94D049BB133111EBULL

IMPL = "cython"


cdef inline uint64_t _u(object x):
    return <uint64_t>(x & MASK)


cdef inline int64_t _s(uint64_t x):
    return <int64_t>x


def wrap(x):
    return _s(_u(x))


def binop(int code, object a, object b):
    cdef int64_t x = _s(_u(a))
    cdef int64_t y = _s(_u(b))
    cdef uint64_t ux = <uint64_t>x
    cdef uint64_t uy = <uint64_t>y
    cdef int64_t r
    if code == 0:
        return _s(ux + uy)
    if code == 1:
        return _s(ux - uy)
    if code == 2:
        return _s(ux * uy)
    if code == 3:
        if y == 0:
            return x
        if y == -1:
            return 0
        r = x % y  # C remainder truncates toward zero
        return r
    if code == 4:
        return 1 if x == y else 0
    if code == 5:
        return 1 if x < y else 0
    if code == 6:
        return 1 if x <= y else 0
    if code == 7:
        return 1 if x >= y else 0
    if code == 8:
        return 1 if (x != 0 and y != 0) else 0
    if code == 9:
        return 1 if (x != 0 or y != 0) else 0
    if code == 10:
        return x ^ y
    raise ValueError(f"unknown operator code {code}")


def cond(c, a, b):
    return a if c != 0 else b


def splitmix64(x):
    cdef uint64_t s = _u(x) + SM_GAMMA
    cdef uint64_t z = s
    z = (z ^ (z >> 30)) * SM_M1
    z = (z ^ (z >> 27)) * SM_M2
    return s, z ^ (z >> 31)


def xorshift_fill(state, Py_ssize_t n):
    cdef uint64_t x = _u(state)
    cdef Py_ssize_t i
    out = [0] * n
    for i in range(n):
        x ^= x >> 12
        x ^= x << 25
        x ^= x >> 27
        out[i] = x * XS_MULT
    return x, out


def split_words(value, list randoms, bint xor):
    cdef uint64_t acc = 0
    cdef uint64_t w
    shares = []
    for r in randoms:
        w = _u(r)
        shares.append(w)
        if xor:
            acc ^= w
        else:
            acc += w
    if xor:
        shares.append(_u(value) ^ acc)
    else:
        shares.append(_u(value) - acc)
    return shares


def combine_words(list words, bint xor):
    cdef uint64_t acc = 0
    for w in words:
        if xor:
            acc ^= _u(w)
        else:
            acc += _u(w)
    return acc


def add_words(list a, list b):
    cdef Py_ssize_t i, n = min(len(a), len(b))
    return [<uint64_t>(_u(a[i]) + _u(b[i])) for i in range(n)]


def sub_words(list a, list b):
    cdef Py_ssize_t i, n = min(len(a), len(b))
    return [<uint64_t>(_u(a[i]) - _u(b[i])) for i in range(n)]


def xor_words(list a, list b):
    cdef Py_ssize_t i, n = min(len(a), len(b))
    return [_u(a[i]) ^ _u(b[i]) for i in range(n)]
