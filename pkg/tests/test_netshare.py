import random

import pytest
from hypothesis import given, settings, strategies as st

from lsym import kernels
from lsym.netshare import (ConcreteBackend, Dealer, Prg, ShareBundle, ShareError, SyncRandStream,
                           beaver_mul, combine, combine_partial, op_dealer, op_linear, reshare,
                           split, sync_rand)

BC, ABC = frozenset("BC"), frozenset("ABC")
M = (1 << 64) - 1


class FixedBits:
    def __init__(self, *words):
        self.words = list(words)

    def getrandbits(self, k):
        return self.words.pop(0)


def signed(x):
    return kernels.wrap(x)


owner_sets = st.frozensets(st.sampled_from("ABCDEF"), min_size=1)
ints = st.integers(-(1 << 63), (1 << 63) - 1)


def test_delegation_vector():
    b = split(0b111, BC, FixedBits(0b010), scheme="xor")
    assert b.by_owner() == {"B": 0b010, "C": 0b101}
    assert combine(b) == 0b111


def test_singleton_split_is_the_value():
    b = split(42, {"A"}, Prg(1))
    assert b.words == (42,)


def test_splitmix_reference_output():
    # first output of the published generator from state 0
    assert kernels.splitmix64(0)[1] == 0xE220A8397B1DCDAF


def _xorshift_star(x, n):
    out = []
    for _ in range(n):
        x ^= x >> 12
        x ^= (x << 25) & M
        x ^= x >> 27
        out.append((x * 0x2545F4914F6CDD1D) & M)
    return out


def test_prg_matches_reference_generator():
    p = Prg(5)
    state = p.state
    assert p.words(20) == _xorshift_star(state, 20)
    assert Prg(0).state != 0


@settings(max_examples=200, deadline=None)
@given(ints, owner_sets, st.integers(0, 2**32), st.sampled_from(["additive", "xor"]))
def test_split_combine_inverse(v, owners, seed, scheme):
    b = split(v, owners, Prg(seed), scheme)
    assert combine(b) == v
    assert combine_partial(b, b.by_owner()) == v
    # flipping one bit of one share changes the result
    words = list(b.words)
    words[0] ^= 1
    assert combine(ShareBundle(b.owners, tuple(words), scheme)) != v


def test_missing_share_is_an_error():
    b = split(3, ABC, Prg(1))
    with pytest.raises(ShareError):
        combine_partial(b, {"A": b.words[0]})
    with pytest.raises(ShareError):
        b.share_of("Z")


@settings(max_examples=200, deadline=None)
@given(ints, owner_sets, owner_sets, st.integers(0, 2**32))
def test_reshare_preserves_value(v, old, new, seed):
    rng = Prg(seed)
    b = reshare(split(v, old, rng), new, rng)
    assert combine(b) == v and b.owners == new


def test_reshare_to_same_owners_rerandomizes():
    rng = Prg(9)
    b = split(77, ABC, rng)
    assert reshare(b, ABC, rng).words != b.words
    with pytest.raises(ShareError):
        reshare(b, set(), rng)


def test_move_through_committee_preserves_multiset():
    rng = Prg(4)
    vals = [5, 3, 9, 1]
    q, s = frozenset("ABC"), frozenset("AB")
    bundles = [split(v, q, rng) for v in vals]
    moved = [reshare(b, s, rng) for b in bundles]
    perm = list(moved)
    random.Random(2).shuffle(perm)
    back = [reshare(b, q, rng) for b in perm]
    assert sorted(combine(b) for b in back) == sorted(vals)


def test_linear_examples():
    rng = Prg(3)
    a, b = split(3, ABC, rng), split(4, ABC, rng)
    assert combine(op_linear("add", a, b)) == 7
    x, z = split(0b1011, ABC, rng, "xor"), split(0, ABC, rng, "xor")
    assert combine(op_linear("xor", x, z)) == 0b1011
    with pytest.raises(ShareError):
        op_linear("add", a, split(1, BC, rng))
    with pytest.raises(ShareError):
        op_linear("mul", a, b)


@settings(max_examples=100, deadline=None)
@given(ints, ints, ints, st.integers(0, 2**32))
def test_linear_associativity(x, y, z, seed):
    rng = Prg(seed)
    a, b, c = (split(v, ABC, rng) for v in (x, y, z))
    left = op_linear("add", op_linear("add", a, b), c)
    right = op_linear("add", a, op_linear("add", b, c))
    assert combine(left) == combine(right) == signed(x + y + z)


def test_dealer_examples():
    d, rng = Dealer(1), Prg(2)
    assert combine(op_dealer("cmp_ge", [split(10, ABC, rng), split(5, ABC, rng)], d, rng)) == 1
    assert combine(op_dealer("mod", [split(7, ABC, rng), split(0, ABC, rng)], d, rng)) == 7
    m = op_dealer("mux", [split(0, ABC, rng), split(4, ABC, rng), split(6, ABC, rng)], d, rng)
    assert combine(m) == 6


def test_dealer_triples_are_valid_and_deterministic():
    d1, d2 = Dealer(11), Dealer(11)
    for _ in range(20):
        t1, t2 = d1.triple(ABC), d2.triple(ABC)
        a, b, c = (combine(x) & M for x in t1)
        assert c == (a * b) & M
        assert [x.words for x in t1] == [x.words for x in t2]
    assert d1.log == d2.log


CLEAR_OPS = {"mul": lambda a, b: signed(a * b), "cmp_ge": lambda a, b: int(a >= b),
             "cmp_lt": lambda a, b: int(a < b), "cmp_le": lambda a, b: int(a <= b),
             "cmp_eq": lambda a, b: int(a == b),
             "mod": lambda a, b: a if b == 0 else int(abs(a) % abs(b) * (1 if a >= 0 else -1))}


@settings(max_examples=500, deadline=None)
@given(st.sampled_from(sorted(CLEAR_OPS)), ints, ints, st.integers(0, 2**32))
def test_dealer_ops_match_clear_oracle(op, x, y, seed):
    rng = Prg(seed)
    d = Dealer(seed)
    r = op_dealer(op, [split(x, ABC, rng), split(y, ABC, rng)], d, rng)
    assert combine(r) == CLEAR_OPS[op](x, y)
    assert r.owners == ABC


def test_beaver_needs_additive():
    rng = Prg(1)
    with pytest.raises(ShareError):
        beaver_mul(split(1, ABC, rng, "xor"), split(2, ABC, rng, "xor"), Dealer(1))


def test_sync_rand():
    assert sync_rand("AB", {"A": 3, "B": 4}, 5) == 2
    assert sync_rand("AB", {"A": 3, "B": 4}, 1) == 0
    with pytest.raises(ShareError):
        sync_rand("AB", {"A": 3}, 5)


def test_sync_stream_is_identical_at_every_party():
    contrib = {"A": 12, "B": 99, "C": 5}
    streams = [SyncRandStream.establish("ABC", contrib) for _ in "ABC"]
    draws = [[s.draw(1000) for _ in range(100)] for s in streams]
    assert draws[0] == draws[1] == draws[2]
    assert len(set(draws[0])) > 50


def test_backend_is_order_independent():
    def run(order):
        be = ConcreteBackend(5)
        b1 = be.share(frozenset("A"), ABC, 6, "x", (0,))
        b2 = be.share(frozenset("B"), ABC, 7, "y", (0,))
        out = {}
        for a in order:
            h, w = be.binop("mul", (b1.handle, b2.handle), (b1.share_of(a), b2.share_of(a)), ABC, a)
            out[a] = w
        return h, out, be
    h1, w1, be = run("ABC")
    h2, w2, _ = run("CBA")
    assert h1 == h2 and w1 == w2
    assert be.open(w1, ABC) == 42 and be.logical(h1) == 42


def test_backend_linear_ops_are_local():
    be = ConcreteBackend(1)
    b1 = be.share(frozenset("A"), ABC, 10, "x", (0,))
    b2 = be.share(frozenset("A"), ABC, 3, "y", (1,))
    words = {}
    for a in "ABC":
        _, words[a] = be.binop("sub", (b1.handle, b2.handle), (b1.share_of(a), b2.share_of(a)), ABC, a)
    assert be.open(words, ABC) == 7


def test_kernel_implementations_agree():
    from lsym import _kernels_py as py
    try:
        from lsym import _kernels_c as cy
    except ImportError:
        pytest.skip("compiled kernels not built")
    rng = random.Random(0)
    for _ in range(2000):
        a, b = rng.randrange(-(1 << 63), 1 << 63), rng.choice([0, -1, 1, rng.randrange(-(1 << 63), 1 << 63)])
        for code in range(11):
            assert py.binop(code, a, b) == cy.binop(code, a, b), (code, a, b)
        assert py.splitmix64(a & M) == cy.splitmix64(a & M)
    assert py.xorshift_fill(7, 50) == cy.xorshift_fill(7, 50)
    r = [rng.getrandbits(64) for _ in range(3)]
    for xor in (False, True):
        w = py.split_words(123, r, xor)
        assert w == cy.split_words(123, r, xor)
        assert py.combine_words(w, xor) == cy.combine_words(w, xor)
    assert py.add_words(r, r) == cy.add_words(r, r)
    assert py.sub_words(r, r[::-1]) == cy.sub_words(r, r[::-1])
