"""Value model shared by both semantics.

Located values ``u@m`` and the opaque value ``STAR`` belong to the single-threaded
machine; local values are the same ``LocValue`` classes with local payloads and no
location. Relocation and slicing are deep, memoized per object, and take a fast
path when a value already fits inside the target mode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .syntax import core as C
from .syntax.pretty import pset_text


# protocols

@dataclass(frozen=True)
class Clear:
    def __str__(self):
        return ""


@dataclass(frozen=True)
class Enc:
    owners: frozenset

    def __str__(self):
        return "enc#" + pset_text(self.owners)


CLEAR = Clear()


def compatible(psi, m) -> bool:
    """``⊢_m ψ``: cleartext always, shares only among exactly the present parties."""
    return psi is CLEAR or psi.owners == m


# values

class Star:
    __slots__ = ()
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "STAR"

    def __reduce__(self):
        return (Star, ())


STAR = Star()
EMPTY: frozenset = frozenset()


@dataclass(eq=True, slots=True)
class IntV:
    i: int
    prot: object = CLEAR


@dataclass(eq=True, slots=True)
class PSetV:
    parties: frozenset


@dataclass(eq=True, slots=True)
class InjV:
    index: int
    payload: object
    _span: Optional[frozenset] = field(default=None, compare=False, repr=False)
    _memo: Optional[dict] = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class PairV:
    left: object
    right: object
    _span: Optional[frozenset] = field(default=None, compare=False, repr=False)
    _memo: Optional[dict] = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class CloV:
    fun: C.Fun
    env: dict
    _span: Optional[frozenset] = field(default=None, compare=False, repr=False)
    _memo: Optional[dict] = field(default=None, compare=False, repr=False)


@dataclass(eq=True, slots=True)
class RefV:
    loc: int
    creators: frozenset


@dataclass(eq=True, slots=True)
class ShareV:
    """One party's word of a concrete share; behaves like ``i^enc#owners``."""
    handle: bytes
    word: int
    owners: frozenset

    @property
    def prot(self):
        return Enc(self.owners)


@dataclass(eq=True, slots=True)
class Located:
    u: object
    at: frozenset
    _span: Optional[frozenset] = field(default=None, compare=False, repr=False)
    _memo: Optional[dict] = field(default=None, compare=False, repr=False)


FLAT = (IntV, PSetV, RefV, ShareV)


def span(v) -> frozenset:
    """Every party named by a location annotation anywhere inside ``v``."""
    if v is STAR:
        return EMPTY
    s = v._span
    if s is None:
        t = type(v)
        if t is Located:
            s = v.at | span_u(v.u)
        else:
            s = span_u(v)
        v._span = s
    return s


def span_u(u) -> frozenset:
    t = type(u)
    if t in FLAT:
        return EMPTY
    if t is Located or u is STAR:
        return span(u)
    s = u._span
    if s is None:
        if t is PairV:
            s = span(u.left) | span(u.right)
        elif t is InjV:
            s = span(u.payload)
        else:
            s = EMPTY
            for w in u.env.values():
                s = s | span(w)
        u._span = s
    return s


def _memo(obj) -> dict:
    d = obj._memo
    if d is None:
        d = obj._memo = {}
    return d


def relocate(v, m: frozenset):
    """``v↓m``: restrict every location to ``m``; empty intersections become ★."""
    if v is STAR:
        return STAR
    q = v.at & m
    if not q:
        return STAR
    if span(v) <= m:
        return v
    memo = _memo(v)
    key = ("r", m)
    r = memo.get(key)
    if r is None:
        r = memo[key] = Located(relocate_u(v.u, m), q)
    return r


def relocate_u(u, m: frozenset):
    t = type(u)
    if t in FLAT or span_u(u) <= m:
        return u
    memo = _memo(u)
    key = ("r", m)
    r = memo.get(key)
    if r is None:
        if t is PairV:
            r = PairV(relocate(u.left, m), relocate(u.right, m))
        elif t is InjV:
            r = InjV(u.index, relocate(u.payload, m))
        else:
            r = CloV(u.fun, relocate_env(u.env, m))
        memo[key] = r
    return r


def relocate_env(env: dict, m: frozenset) -> dict:
    return {x: relocate(w, m) for x, w in env.items()}


def located_span_ok(v, m: frozenset) -> bool:
    return v is STAR or span(v) <= m


# slicing

def slice_value(v, party: str):
    """``v⟦A⟧``: A's local view, or ★ where A is not among the holders."""
    if v is STAR:
        return STAR
    if party not in v.at:
        return STAR
    return slice_u(v.u, party)


def slice_u(u, party: str):
    t = type(u)
    if t in FLAT:
        return u
    memo = _memo(u)
    key = ("s", party)
    r = memo.get(key)
    if r is None:
        if t is PairV:
            r = PairV(slice_value(u.left, party), slice_value(u.right, party))
        elif t is InjV:
            r = InjV(u.index, slice_value(u.payload, party))
        else:
            r = CloV(u.fun, slice_env(u.env, party))
        memo[key] = r
    return r


def slice_env(env: dict, party: str) -> dict:
    return {x: slice_value(w, party) for x, w in env.items()}


# machine state shared by both evaluators

@dataclass(frozen=True, slots=True)
class Frame:
    binder: str
    body: object
    mode: frozenset
    env: dict


@dataclass(slots=True)
class STConfig:
    mode: frozenset
    env: dict
    store: dict          # loc -> (creators, value)
    stack: tuple         # linked: () or (frame, rest)
    expr: object
    next_loc: int = 0
    next_fresh: int = 0
    cursors: dict = field(default_factory=dict)   # party -> reads consumed
    outputs: dict = field(default_factory=dict)   # party -> tuple of writes


@dataclass(slots=True)
class LocalConfig:
    party: str
    mode: frozenset
    env: dict
    store: dict          # loc -> local value
    stack: tuple
    expr: object
    next_loc: int = 0
    next_fresh: int = 0
    cursor: int = 0
    outputs: tuple = ()


def stack_frames(stack) -> list:
    out = []
    while stack:
        out.append(stack[0])
        stack = stack[1]
    return out


def stack_depth(stack) -> int:
    n = 0
    while stack:
        n += 1
        stack = stack[1]
    return n


def initial_st(mode, expr) -> STConfig:
    return STConfig(frozenset(mode), {}, {}, (), expr)


def slice_stack(stack, party: str):
    frames = stack_frames(stack)
    out = ()
    for f in reversed(frames):
        out = (Frame(f.binder, f.body, f.mode, slice_env(f.env, party)), out)
    return out


def slice_local(z: STConfig, party: str) -> LocalConfig:
    store = {loc: slice_value(v, party) for loc, (cr, v) in z.store.items() if party in cr}
    return LocalConfig(party, z.mode, slice_env(z.env, party), store,
                       slice_stack(z.stack, party), z.expr, z.next_loc, z.next_fresh,
                       z.cursors.get(party, 0), tuple(z.outputs.get(party, ())))


def slice_config(z: STConfig) -> dict:
    """``ζ⇓``: one local configuration per party in the current mode."""
    return {a: slice_local(z, a) for a in sorted(z.mode)}


# canonical forms

def is_fresh(name: str) -> bool:
    return name.startswith("%")


def _env_order(x: str):
    # machine names sort by counter so monotone renumbering keeps their order
    return (1, int(x[1:]), "") if is_fresh(x) else (0, 0, x)


class _Canon:
    """Hash-consed serialization: shared sub-values are numbered once."""

    def __init__(self, store: dict):
        self.nodes: list = []
        self.index: dict = {}
        self.by_id: dict = {}
        self.store = store
        self.loc_rank: dict = {}     # location -> order of first use
        self.fresh: dict = {}

    def name(self, x: str):
        if is_fresh(x):
            if x not in self.fresh:
                self.fresh[x] = len(self.fresh)
            return ("%", self.fresh[x])
        return x

    def intern(self, key) -> int:
        n = self.index.get(key)
        if n is None:
            n = self.index[key] = len(self.nodes)
            self.nodes.append(key)
        return n

    def loc(self, loc):
        if loc not in self.store:
            return ("dangling", loc)
        r = self.loc_rank.get(loc)
        if r is None:
            r = self.loc_rank[loc] = len(self.loc_rank)
        return r

    def cells(self) -> tuple:
        """Store cells in first-use order; cells reached only through other cells
        follow, then unreachable ones by allocation order."""
        out = []
        order = list(self.loc_rank)
        i = 0
        while True:
            while i < len(order):
                loc = order[i]
                cell = self.store[loc]
                creators, v = cell if type(cell) is tuple else (None, cell)
                out.append((self.value(v), None if creators is None else tuple(sorted(creators))))
                i += 1
                order = list(self.loc_rank)
            rest = [loc for loc in sorted(self.store) if loc not in self.loc_rank]
            if not rest:
                return tuple(out)
            self.loc(rest[0])
            order = list(self.loc_rank)

    def value(self, v) -> int:
        k = id(v)
        hit = self.by_id.get(k)
        if hit is not None and hit[0] is v:
            return hit[1]
        n = self.intern(self.key(v))
        self.by_id[k] = (v, n)
        return n

    def key(self, v):
        t = type(v)
        if v is STAR:
            return ("*",)
        if t is Located:
            return ("@", self.value(v.u), tuple(sorted(v.at)))
        if t is IntV:
            return ("i", v.i, str(v.prot))
        if t is PSetV:
            return ("p", tuple(sorted(v.parties)))
        if t is RefV:
            return ("l", self.loc(v.loc), tuple(sorted(v.creators)))
        if t is ShareV:
            return ("sh", v.handle, v.word, tuple(sorted(v.owners)))
        if t is InjV:
            return ("inj", v.index, self.value(v.payload))
        if t is PairV:
            return ("pair", self.value(v.left), self.value(v.right))
        if t is CloV:
            return ("clo", v.fun, self.env(v.env))
        raise TypeError(f"not a value: {v!r}")

    def env(self, env: dict, drop_fresh: bool = False) -> tuple:
        return tuple((self.name(x), self.value(env[x])) for x in sorted(env, key=_env_order)
                     if not (drop_fresh and is_fresh(x)))

    def expr(self, e):
        if type(e) is C.Var and is_fresh(e.name):
            return ("var", self.name(e.name))
        return e


def _cfg_parts(c):
    if isinstance(c, STConfig):
        return c.mode, c.env, c.store, c.stack, c.expr, \
            tuple(sorted(c.cursors.items())), tuple(sorted((a, tuple(o)) for a, o in c.outputs.items()))
    return c.mode, c.env, c.store, c.stack, c.expr, c.cursor, tuple(c.outputs)


def canonicalize(c) -> tuple:
    """Identifier-independent form: equal configurations give equal tuples."""
    mode, env, store, stack, expr, cursors, outputs = _cfg_parts(c)
    k = _Canon(store)
    env_key = k.env(env)
    stack_key = tuple((k.name(f.binder), f.body, tuple(sorted(f.mode)), k.env(f.env))
                      for f in stack_frames(stack))
    expr_key = k.expr(expr)
    return (tuple(sorted(mode)), env_key, k.cells(), stack_key, expr_key,
            cursors, outputs, tuple(k.nodes))


def canonical_terminal(c, final_store: dict, final_value) -> tuple:
    """Terminal view: machine-generated bindings and sync heads are masked."""
    mode, env, _store, stack, expr, cursors, outputs = _cfg_parts(c)
    k = _Canon(final_store)
    env_key = k.env(env, drop_fresh=True)
    value_key = k.value(final_value)
    store_key = k.cells()
    masked = (type(expr) is C.Var and is_fresh(expr.name)) or isinstance(expr, C.SYNC_TYPES)
    return (tuple(sorted(mode)), env_key, store_key, stack_depth(stack),
            "<sync>" if masked else expr, value_key, cursors, outputs, tuple(k.nodes))


# debug text

def show(v) -> str:
    if v is STAR:
        return "*"
    t = type(v)
    if t is Located:
        return f"{show(v.u)}@{pset_text(v.at)}"
    if t is IntV:
        return str(v.i) if v.prot is CLEAR else f"{v.i}^{v.prot}"
    if t is PSetV:
        return pset_text(v.parties)
    if t is RefV:
        return f"loc{v.loc}^#{pset_text(v.creators)}"
    if t is ShareV:
        return f"share[{v.handle.hex()[:8]}:{v.word:#x}]^enc#{pset_text(v.owners)}"
    if t is InjV:
        return f"inj{v.index} {_paren(v.payload)}"
    if t is PairV:
        return f"<{show(v.left)}, {show(v.right)}>"
    if t is CloV:
        return f"<fun [{v.fun.self_name}] {v.fun.param}>"
    raise TypeError(f"not a value: {v!r}")


def _paren(v) -> str:
    s = show(v)
    return f"({s})" if " " in s and not s.startswith("<") else s


def show_env(env: dict) -> str:
    return "{" + ", ".join(f"{x} -> {show(env[x])}" for x in sorted(env)) + "}"


def decode_list(v) -> Optional[list]:
    """Python list for a value in the cons-cell encoding, or None if it is not one."""
    out = []
    while True:
        if type(v) is Located:
            v = v.u
        if type(v) is not InjV:
            return None
        if v.index == 1:
            return out
        cell = v.payload.u if type(v.payload) is Located else v.payload
        if type(cell) is not PairV:
            return None
        out.append(cell.left)
        v = cell.right


def int_of(v) -> Optional[int]:
    """Integer payload of a (possibly located) integer value."""
    if type(v) is Located:
        v = v.u
    return v.i if type(v) is IntV else None
