"""Random closed core terms for property checks.

The generator tracks, for every variable in scope, what kind of value it holds and
where that value is located, so by default it produces terms that run to a
terminal state. ``stuck=True`` splices one failing binding into the top-level
chain instead, which always executes.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional

from ..st_eval import InputOracle
from ..syntax import core as C

PARTIES = ("A", "B", "C", "D")
INT_OPS = ("add", "sub", "mul", "mod", "eq", "lt", "le", "ge", "and", "or", "xor")

# every production of the core grammar; coverage is measured against this
PRODUCTIONS = ("Var", "Lit", "PSetLit", "BinOp", "Mux", "Inj", "Pair", "Proj", "Fun", "Ref",
               "Deref", "Assign", "Read", "Write", "Share", "Reveal", "CaseSum", "CasePSet",
               "App", "Par", "Let")


@dataclass(frozen=True)
class Info:
    kind: str                       # int pset ref pair sum fun star
    at: frozenset = frozenset()
    prot: Optional[frozenset] = None   # owners of a share, None for cleartext
    pset: Optional[frozenset] = None   # statically known party-set value
    creators: Optional[frozenset] = None
    parts: tuple = ()               # component infos for pairs and sums
    mode: Optional[frozenset] = None   # creation mode of functions


STAR_INFO = Info("star")


def reloc(info: Info, m: frozenset) -> Info:
    if info.kind == "star":
        return info
    at = info.at & m
    if not at:
        return STAR_INFO
    return replace(info, at=at, parts=tuple(reloc(p, m) for p in info.parts))


@dataclass
class Generated:
    expr: object
    principals: tuple
    io: InputOracle
    seed: int
    stuck: bool = False


class _Block:
    """A let-chain under construction."""

    def __init__(self):
        self.binds: list = []

    def add(self, name, bound):
        self.binds.append((name, bound))

    def close(self, result: str):
        e = C.Var(result)
        for name, bound in reversed(self.binds):
            e = C.Let(name, bound, e)
        return e


class TermGenerator:
    def __init__(self, seed: int, max_size: int = 40, max_parties: int = 4, io: bool = True,
                 stuck: bool = False):
        if not 1 <= max_parties <= len(PARTIES):
            raise ValueError(f"party bound must be between 1 and {len(PARTIES)}")
        self.seed = seed
        self.max_size = max_size
        self.max_parties = max_parties
        self.io = io
        self.stuck = stuck

    def generate(self) -> Generated:
        rng = random.Random(self.seed)
        for _attempt in range(200):
            n = rng.randint(1, self.max_parties)
            principals = PARTIES[:n]
            g = _Gen(rng, self.io, frozenset(principals))
            expr = g.top(frozenset(principals), rng.randint(3, 9), self.stuck)
            if C.size(expr) <= self.max_size:
                queues = {a: tuple(rng.randrange(-50, 50) for _ in range(g.reads + 2))
                          for a in principals}
                return Generated(expr, principals, InputOracle(queues), self.seed, self.stuck)
        raise RuntimeError("could not generate a term within the size bound")


class _Gen:
    def __init__(self, rng: random.Random, io: bool, universe: frozenset):
        self.rng = rng
        self.universe = universe
        self.io = io
        self.counter = 0
        self.reads = 0

    def fresh(self, base="x") -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    # scope queries

    @staticmethod
    def usable(scope, m, kind=None, pred=None):
        return [(x, i) for x, i in scope
                if i.kind != "star" and m <= i.at and (kind is None or i.kind == kind)
                and (pred is None or pred(i))]

    def pick(self, xs):
        return self.rng.choice(xs) if xs else None

    # entry points

    def top(self, m, n, stuck):
        block, scope = _Block(), []
        bad_at = self.rng.randrange(n) if stuck else -1
        for k in range(n):
            if k == bad_at:
                self.bad(block, scope, m)
            self.binding(block, scope, m, depth=0)
        res = self.pick([x for x, _ in scope]) if scope else None
        if res is None:
            res = self.lit(block, scope, m)
        return block.close(res)

    def sub_block(self, scope, m, depth, want_int=True):
        """A nested chain whose result is a cleartext int at ``m``; returns (expr, info)."""
        block, inner = _Block(), list(scope)
        for _ in range(self.rng.randint(0, 2)):
            self.binding(block, inner, m, depth + 1)
        ints = self.usable(inner, m, "int", lambda i: i.prot is None)
        res = self.pick(ints)
        x = res[0] if res else self.lit(block, inner, m)
        return block.close(x), Info("int", m)

    def lit(self, block, scope, m) -> str:
        x = self.fresh()
        block.add(x, C.Lit(self.rng.randrange(-9, 10)))
        scope.append((x, Info("int", m)))
        return x

    def pset_lit(self, block, scope, m, parties) -> str:
        x = self.fresh("p")
        block.add(x, C.PSetLit(frozenset(parties)))
        scope.append((x, Info("pset", m, pset=frozenset(parties))))
        return x

    def subset(self, universe, nonempty=True):
        u = sorted(universe)
        while True:
            s = frozenset(a for a in u if self.rng.random() < 0.5)
            if s or not nonempty:
                return s

    # one let-binding

    def binding(self, block, scope, m, depth):
        choices = ["lit", "lit", "pset", "binop", "binop", "mux", "pair", "inj", "proj",
                   "ref", "deref", "assign", "share", "share", "reveal", "reveal", "reveal", "if",
                   "casep", "var"]
        if depth < 2:
            choices += ["par", "par", "fun", "app", "app", "case"]
        if self.io and len(m) == 1:
            choices += ["read", "read", "write"]
        for _ in range(6):
            kind = self.rng.choice(choices)
            if getattr(self, "b_" + kind)(block, scope, m, depth):
                return
        self.lit(block, scope, m)

    def bind(self, block, scope, bound, info, base="x"):
        x = self.fresh(base)
        block.add(x, bound)
        scope.append((x, info))
        return x

    def b_lit(self, block, scope, m, depth):
        self.lit(block, scope, m)
        return True

    def b_var(self, block, scope, m, depth):
        src = self.pick([(x, i) for x, i in scope if i.kind != "star"])
        if src is None:
            return False
        self.bind(block, scope, C.Var(src[0]), reloc(src[1], m))
        return True

    def b_pset(self, block, scope, m, depth):
        psets = self.usable(scope, m, "pset", lambda i: i.pset is not None)
        if len(psets) >= 2 and self.rng.random() < 0.5:
            (x, i), (y, j) = self.rng.sample(psets, 2)
            self.bind(block, scope, C.BinOp("union", x, y), Info("pset", m, pset=i.pset | j.pset))
        else:
            self.pset_lit(block, scope, m, self.subset(self.universe, nonempty=False))
        return True

    def int_groups(self, scope, m):
        groups: dict = {}
        for x, i in self.usable(scope, m, "int"):
            if i.prot is None or i.prot == m:
                groups.setdefault(i.prot, []).append(x)
        return groups

    def b_binop(self, block, scope, m, depth):
        groups = self.int_groups(scope, m)
        if not groups:
            return False
        prot = self.rng.choice(sorted(groups, key=lambda p: (p is not None, sorted(p or ()))))
        xs = groups[prot]
        self.bind(block, scope, C.BinOp(self.rng.choice(INT_OPS), self.rng.choice(xs),
                                        self.rng.choice(xs)), Info("int", m, prot))
        return True

    def b_mux(self, block, scope, m, depth):
        groups = self.int_groups(scope, m)
        if not groups:
            return False
        prot = self.rng.choice(sorted(groups, key=lambda p: (p is not None, sorted(p or ()))))
        xs = groups[prot]
        c, a, b = (self.rng.choice(xs) for _ in range(3))
        self.bind(block, scope, C.Mux(c, a, b), Info("int", m, prot))
        return True

    def b_pair(self, block, scope, m, depth):
        if not scope:
            return False
        (x, i), (y, j) = self.rng.choice(scope), self.rng.choice(scope)
        self.bind(block, scope, C.Pair(x, y), Info("pair", m, parts=(reloc(i, m), reloc(j, m))))
        return True

    def b_inj(self, block, scope, m, depth):
        if not scope:
            return False
        x, i = self.rng.choice(scope)
        k = self.rng.choice((1, 2))
        self.bind(block, scope, C.Inj(k, x), Info("sum", m, pset=frozenset((k,)),
                                                 parts=(reloc(i, m),)))
        return True

    def b_proj(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "pair"))
        if src is None:
            return False
        k = self.rng.choice((1, 2))
        self.bind(block, scope, C.Proj(k, src[0]), reloc(src[1].parts[k - 1], m))
        return True

    def b_ref(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "int", lambda i: i.prot is None))
        if src is None:
            return False
        self.bind(block, scope, C.Ref(src[0]), Info("ref", m, creators=m, parts=(Info("int", m),)),
                  "r")
        return True

    def b_deref(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "ref"))
        if src is None:
            return False
        self.bind(block, scope, C.Deref(src[0]), reloc(src[1].parts[0], m))
        return True

    def b_assign(self, block, scope, m, depth):
        ref = self.pick(self.usable(scope, m, "ref", lambda i: i.creators == m))
        val = self.pick(self.usable(scope, m, "int", lambda i: i.prot is None))
        if ref is None or val is None:
            return False
        self.bind(block, scope, C.Assign(ref[0], val[0]), Info("int", m))
        return True

    def sync_sets(self, block, scope, m, p):
        q = (m - p) | self.subset(p, nonempty=False)
        if not q:
            q = frozenset((self.rng.choice(sorted(m)),))
        return self.pset_lit(block, scope, m, p), self.pset_lit(block, scope, m, q), q

    def b_share(self, block, scope, m, depth):
        cands = [(x, i) for x, i in scope if i.kind == "int" and i.at and
                 (i.prot is None or i.prot == i.at & m) and i.at & m]
        src = None
        for x, i in self.rng.sample(cands, len(cands)):
            p = self.subset(i.at & m) if i.prot is None else i.prot
            if p <= i.at and p <= m:
                src = x, p
                break
        if src is None:
            return False
        x, p = src
        sp, sq, q = self.sync_sets(block, scope, m, p)
        self.bind(block, scope, C.Share(sp, sq, x), Info("int", q, q))
        return True

    def b_reveal(self, block, scope, m, depth):
        cands = [(x, i) for x, i in scope if i.kind == "int" and i.prot is not None
                 and i.prot <= i.at and i.prot <= m]
        src = self.pick(cands)
        if src is None:
            return False
        x, i = src
        sp, sq, q = self.sync_sets(block, scope, m, i.prot)
        self.bind(block, scope, C.Reveal(sp, sq, x), Info("int", q))
        return True

    def b_read(self, block, scope, m, depth):
        self.reads += 1
        self.bind(block, scope, C.Read(), Info("int", m))
        return True

    def b_write(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "int", lambda i: i.prot is None))
        if src is None:
            return False
        self.bind(block, scope, C.Write(src[0]), Info("int", m))
        return True

    def b_par(self, block, scope, m, depth):
        P = self.subset(self.universe, nonempty=False)
        sp = self.pset_lit(block, scope, m, P)
        inner = m & P
        if inner:
            body, info = self.sub_block(scope, inner, depth)
        else:
            body, info = C.Lit(self.rng.randrange(10)), STAR_INFO
        self.bind(block, scope, C.Par(sp, body), info)
        return True

    def b_fun(self, block, scope, m, depth):
        f, x = self.fresh("f"), self.fresh("a")
        body, _ = self.sub_block(scope + [(x, Info("int", m))], m, depth)
        self.bind(block, scope, C.Fun(f, x, body), Info("fun", m, mode=m), "g")
        return True

    def b_app(self, block, scope, m, depth):
        fn = self.pick(self.usable(scope, m, "fun", lambda i: i.mode == m))
        arg = self.pick(self.usable(scope, m, "int", lambda i: i.prot is None))
        if fn is None or arg is None:
            return False
        self.bind(block, scope, C.App(fn[0], arg[0]), Info("int", m))
        return True

    def b_if(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "int", lambda i: i.prot is None))
        if src is None or depth >= 2:
            return False
        s = self.bind(block, scope, C.ToSum(src[0]), Info("sum", m, parts=(Info("int", m),)), "s")
        return self._case(block, scope, m, depth, s, Info("int", m), Info("int", m))

    def b_case(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "sum"))
        if src is None:
            return False
        payload = reloc(src[1].parts[0], m)
        return self._case(block, scope, m, depth, src[0], payload, payload)

    def _case(self, block, scope, m, depth, s, left, right):
        y, z = self.fresh("l"), self.fresh("r")
        lb, _ = self.sub_block(scope + [(y, left)], m, depth)
        rb, _ = self.sub_block(scope + [(z, right)], m, depth)
        self.bind(block, scope, C.CaseSum(s, y, lb, z, rb), Info("int", m))
        return True

    def b_casep(self, block, scope, m, depth):
        src = self.pick(self.usable(scope, m, "pset"))
        if src is None or depth >= 2:
            return False
        P = src[1].pset
        b, r = self.fresh("b"), self.fresh("t")
        if P:
            bi = Info("pset", m, pset=frozenset((min(P),)))
            ri = Info("pset", m, pset=P - {min(P)})
        else:
            bi = ri = Info("pset", m)
        eb, _ = self.sub_block(scope, m, depth)
        nb, _ = self.sub_block(scope + [(b, bi), (r, ri)], m, depth)
        self.bind(block, scope, C.CasePSet(src[0], eb, b, r, nb), Info("int", m))
        return True

    # a binding whose premises fail

    def bad(self, block, scope, m):
        opts = []
        refs = [(x, i) for x, i in scope if i.kind == "ref" and i.at and i.creators != i.at & m]
        if refs:
            opts.append("assign")
        narrow = [(x, i) for x, i in scope if i.kind == "int" and i.at and i.at & m and
                  not m <= i.at]
        if narrow:
            opts.append("narrow")
        opts += ["proj", "app", "reveal"]
        kind = self.rng.choice(opts)
        if kind == "assign":
            x, _ = self.rng.choice(refs)
            v = self.lit(block, scope, m)
            self.bind(block, scope, C.Assign(x, v), Info("int", m))
        elif kind == "narrow":
            x, _ = self.rng.choice(narrow)
            self.bind(block, scope, C.BinOp("add", x, x), Info("int", m))
        elif kind == "proj":
            k = self.lit(block, scope, m)
            self.bind(block, scope, C.Proj(1, k), Info("int", m))
        elif kind == "app":
            k = self.lit(block, scope, m)
            self.bind(block, scope, C.App(k, k), Info("int", m))
        else:
            k = self.lit(block, scope, m)
            sp = self.pset_lit(block, scope, m, m)
            self.bind(block, scope, C.Reveal(sp, sp, k), Info("int", m))


def productions(e) -> Counter:
    return Counter(type(t).__name__ for t in C.subterms(e))


def coverage(terms) -> set:
    """Core productions that occur in none of ``terms``."""
    seen = set()
    for t in terms:
        seen |= set(productions(t.expr if isinstance(t, Generated) else t))
    return set(PRODUCTIONS) - seen


def generate_many(n: int, seed: int = 0, **kw) -> list:
    return [TermGenerator(seed * 100_003 + k, **kw).generate() for k in range(n)]
