"""Simulated secret sharing: split/combine, resharing, local linear ops, an ideal
dealer for everything else, and synchronized randomness.

Words are unsigned 64-bit on the wire; ``combine`` returns the signed integer the
language sees.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import kernels

SCHEMES = ("additive", "xor")


class ShareError(ValueError):
    pass


class Prg:
    """xorshift64* seeded through one splitmix64 step, so any seed (even 0) works.

    Exposes ``getrandbits`` so it can stand in for ``random.Random`` where only
    words are needed.
    """

    def __init__(self, seed: int):
        _, s = kernels.splitmix64(seed & kernels.MASK)
        self.state = s or 1

    def next_word(self) -> int:
        self.state, out = kernels.xorshift_fill(self.state, 1)
        return out[0]

    def words(self, n: int) -> list[int]:
        self.state, out = kernels.xorshift_fill(self.state, n)
        return out

    def getrandbits(self, k: int) -> int:
        if k > 64:
            raise ValueError("at most 64 bits per draw")
        return self.next_word() >> (64 - k) if k else 0

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next_word() % n


def digest(*parts) -> bytes:
    return hashlib.blake2b(repr(parts).encode(), digest_size=16).digest()


def prg_for(handle: bytes) -> Prg:
    return Prg(int.from_bytes(handle[:8], "little"))


@dataclass(frozen=True)
class ShareBundle:
    owners: frozenset
    words: tuple          # one word per owner, in sorted owner order
    scheme: str = "additive"
    handle: bytes = field(default=b"", compare=False)

    def __post_init__(self):
        if not self.owners:
            raise ShareError("a bundle needs at least one owner")
        if len(self.words) != len(self.owners):
            raise ShareError("every owner holds exactly one share")
        if self.scheme not in SCHEMES:
            raise ShareError(f"unknown scheme {self.scheme!r}")

    @property
    def order(self) -> list:
        return sorted(self.owners)

    def share_of(self, party: str) -> int:
        try:
            return self.words[self.order.index(party)]
        except ValueError:
            raise ShareError(f"{party} holds no share of this bundle") from None

    def by_owner(self) -> dict:
        return dict(zip(self.order, self.words))


def split(value: int, owners: Iterable[str], rng, scheme: str = "additive",
          handle: bytes = b"") -> ShareBundle:
    owners = frozenset(owners)
    if not owners:
        raise ShareError("cannot split among nobody")
    randoms = [rng.getrandbits(64) for _ in range(len(owners) - 1)]
    words = kernels.split_words(value, randoms, scheme == "xor")
    return ShareBundle(owners, tuple(words), scheme, handle)


def combine_words(words: Iterable[int], scheme: str = "additive") -> int:
    return kernels.wrap(kernels.combine_words(list(words), scheme == "xor"))


def combine(b: ShareBundle) -> int:
    return combine_words(b.words, b.scheme)


def combine_partial(b: ShareBundle, held: dict) -> int:
    """Reconstruct from the shares parties actually present; all owners must appear."""
    missing = b.owners - held.keys()
    if missing:
        raise ShareError(f"missing shares from {sorted(missing)}")
    return combine_words((held[a] for a in b.order), b.scheme)


def reshare(b: ShareBundle, new_owners: Iterable[str], rng, handle: bytes = b"") -> ShareBundle:
    new_owners = frozenset(new_owners)
    if not new_owners:
        raise ShareError("cannot reshare to an empty set")
    return split(combine(b), new_owners, rng, b.scheme, handle)


LINEAR = {"additive": ("add", "sub"), "xor": ("xor",)}


def _same_owners(bundles) -> tuple:
    first = bundles[0]
    for b in bundles[1:]:
        if b.owners != first.owners:
            raise ShareError("operands are shared among different parties")
        if b.scheme != first.scheme:
            raise ShareError("operands use different schemes")
    return first.owners, first.scheme


def op_linear(op: str, a: ShareBundle, b: ShareBundle, handle: bytes = b"") -> ShareBundle:
    owners, scheme = _same_owners([a, b])
    if op not in LINEAR[scheme]:
        raise ShareError(f"{op} is not local under the {scheme} scheme")
    f = {"add": kernels.add_words, "sub": kernels.sub_words, "xor": kernels.xor_words}[op]
    return ShareBundle(owners, tuple(f(list(a.words), list(b.words))), scheme, handle)


# dealer-assisted operations

DEALER_OPS = {"cmp_ge": "ge", "cmp_lt": "lt", "cmp_le": "le", "cmp_eq": "eq"}


def _clear_op(op: str, xs: list[int]) -> int:
    if op == "mux":
        return kernels.cond(*xs)
    return kernels.apply_op(DEALER_OPS.get(op, op), xs[0], xs[1])


@dataclass
class Dealer:
    """Trusted third party handing out correlated randomness; deterministic per seed."""
    seed: int = 0
    log: list = field(default_factory=list)

    def __post_init__(self):
        self.prg = Prg(self.seed)

    def triple(self, owners: frozenset, scheme: str = "additive"):
        a, b = self.prg.next_word(), self.prg.next_word()
        c = (a * b) & kernels.MASK
        bundles = tuple(split(x, owners, self.prg, scheme) for x in (a, b, c))
        self.log.append((a, b, c))
        return bundles


def beaver_mul(x: ShareBundle, y: ShareBundle, d: Dealer, handle: bytes = b"") -> ShareBundle:
    """Additive multiplication from one dealer triple and two openings."""
    owners, scheme = _same_owners([x, y])
    if scheme != "additive":
        raise ShareError("Beaver multiplication needs the additive scheme")
    ta, tb, tc = d.triple(owners, scheme)
    e = kernels.to_unsigned(combine(op_linear("sub", x, ta)))
    f = kernels.to_unsigned(combine(op_linear("sub", y, tb)))
    words = []
    for k, (wa, wb, wc) in enumerate(zip(ta.words, tb.words, tc.words)):
        w = wc + e * wb + f * wa
        if k == 0:
            w += e * f
        words.append(w & kernels.MASK)
    return ShareBundle(owners, tuple(words), scheme, handle)


def op_dealer(op: str, inputs: list, d: Dealer, rng, handle: bytes = b"") -> ShareBundle:
    """Nonlinear operation on shares; the result is freshly shared among the same owners."""
    owners, scheme = _same_owners(list(inputs))
    if op == "mul" and scheme == "additive":
        return beaver_mul(inputs[0], inputs[1], d, handle)
    value = _clear_op(op, [combine(b) for b in inputs])
    d.log.append((op, value))
    return split(value, owners, rng, scheme, handle)


# synchronized randomness

def sync_rand(P: Iterable[str], contributions: dict, n: int) -> int:
    P = frozenset(P)
    if n <= 0:
        raise ShareError("modulus must be positive")
    missing = P - contributions.keys()
    if missing:
        raise ShareError(f"missing contributions from {sorted(missing)}")
    return sum(contributions[a] for a in P) % n


GAMMA = 0x9E3779B97F4A7C15


@dataclass
class SyncRandStream:
    """Common random stream for P, seeded by the sum of one contribution per member."""
    parties: frozenset
    seed: int
    counter: int = 0

    @classmethod
    def establish(cls, P: Iterable[str], contributions: dict) -> "SyncRandStream":
        P = frozenset(P)
        return cls(P, sync_rand(P, contributions, 1 << 64))

    def draw(self, n: int) -> int:
        if n <= 0:
            raise ShareError("modulus must be positive")
        # the counter-th output of the splitmix64 sequence started at the seed
        _, w = kernels.splitmix64((self.seed + self.counter * GAMMA) & kernels.MASK)
        self.counter += 1
        return w % n


# backend for the concrete distributed mode

class ConcreteBackend:
    """Handle-addressed share registry used by concrete distributed runs.

    Every share value a party holds names a handle. A handle is a digest of how the
    value was made, so each party can ask for its own word independently and every
    schedule sees the same words. Linear ops are computed locally; the registry
    records the full bundle only so the ideal dealer can evaluate nonlinear ops.
    """

    def __init__(self, seed: int = 0, scheme: str = "additive"):
        if scheme != "additive":
            raise ShareError("the concrete mode runs the additive scheme")
        self.seed = seed
        self.scheme = scheme
        self.registry: dict[bytes, ShareBundle] = {}
        self.dealer = Dealer(seed)

    def _rng(self, handle: bytes) -> Prg:
        return Prg(int.from_bytes(handle[:8], "little") ^ self.seed)

    def deal(self, value: int, owners: frozenset, handle: bytes) -> ShareBundle:
        b = self.registry.get(handle)
        if b is None:
            b = self.registry[handle] = split(value, owners, self._rng(handle), self.scheme, handle)
        return b

    def share(self, p: frozenset, q: frozenset, value: int, source, counters: tuple) -> ShareBundle:
        h = digest("share", sorted(p), sorted(q), source, counters)
        return self.deal(value, q, h)

    def open(self, held: dict, owners: frozenset) -> int:
        missing = owners - held.keys()
        if missing:
            raise ShareError(f"missing shares from {sorted(missing)}")
        return combine_words((held[a] for a in sorted(owners)), self.scheme)

    def binop(self, op: str, handles: tuple, words: tuple, owners: frozenset, party: str):
        h = digest(op, handles)
        b = self.registry.get(h)
        if b is None:
            inputs = [self.registry[x] for x in handles]
            if op in LINEAR[self.scheme]:
                b = op_linear(op, inputs[0], inputs[1], h)
            else:
                # per-handle dealer randomness keeps words independent of request order
                d = Dealer(int.from_bytes(h[:8], "little") ^ self.seed)
                b = op_dealer(op, inputs, d, self._rng(h), h)
                self.dealer.log.extend(d.log)
            self.registry[h] = b
        if op in LINEAR[self.scheme]:
            f = kernels.add_words if op == "add" else kernels.sub_words
            return h, f([words[0]], [words[1]])[0]
        return h, b.share_of(party)

    def logical(self, handle: bytes) -> Optional[int]:
        """Ghost value of a registered handle, for assertions only."""
        b = self.registry.get(handle)
        return None if b is None else combine(b)
