"""Surface program to closed ANF core term."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable

from . import core as C
from . import surface as S
from .parser import ParseError, parse

INT_MIN, INT_MAX = -(1 << 63), (1 << 63) - 1

SURFACE_OPS = {
    "+": "add", "-": "sub", "*": "mul", "%": "mod", "==": "eq", "<": "lt",
    "<=": "le", ">=": "ge", "&&": "and", "||": "or", "^": "xor", "\\/": "union",
}


class LowerError(Exception):
    def __init__(self, message: str, pos=(0, 0)):
        self.message = message
        self.line, self.col = pos
        super().__init__(f"{self.line}:{self.col}: {message}")


@dataclass(frozen=True)
class CoreProgram:
    principals: tuple
    expr: object


class Lowerer:
    def __init__(self, principals, reserved: set, temp_prefix: str = "_t"):
        self.principals = frozenset(principals)
        self.reserved = reserved
        self.prefix = temp_prefix
        self.counter = 0

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"{self.prefix}{self.counter}"
            if name not in self.reserved:
                return name

    def check_binder(self, name: str, pos):
        if name in self.principals:
            raise LowerError(f"binder {name!r} clashes with a declared party", pos)

    # operands: non-variables get let-bound, left to right

    def var(self, se, scope, k: Callable[[str], object]):
        if isinstance(se, S.SVar):
            self.lookup(se, scope)
            return k(se.name)
        t = self.fresh()
        return C.Let(t, self.expr(se, scope), k(t))

    def vars(self, ses, scope, k):
        names: list[str] = []

        def go(i):
            if i == len(ses):
                return k(*names)

            def got(x):
                names.append(x)
                return go(i + 1)
            return self.var(ses[i], scope, got)
        return go(0)

    def lookup(self, se: S.SVar, scope):
        if se.name in scope:
            return
        if se.name in self.principals:
            raise LowerError(f"party {se.name} used as a value; write {{{se.name}}}", se.pos)
        if se.name == "_":
            raise LowerError("wildcard '_' cannot be used as a value", se.pos)
        raise LowerError(f"unbound variable {se.name!r}", se.pos)

    # patterns

    def destructure(self, pat, source: str, scope, body: Callable[[frozenset], object]):
        """Bind the names of a pattern from variable `source`, then continue."""
        if isinstance(pat, S.PName):
            if pat.name == "_":
                return body(scope)
            self.check_binder(pat.name, pat.pos)
            return C.Let(pat.name, C.Var(source), body(scope | {pat.name}))
        if isinstance(pat, S.PUnit):
            return body(scope)
        items = pat.items
        first, rest = items[0], items[1:]
        a = self.fresh()
        b = self.fresh()

        def after_first(sc):
            if len(rest) == 1:
                return self.destructure(rest[0], b, sc, body)
            return self.destructure(S.PTuple(rest, pos=pat.pos), b, sc, body)
        return C.Let(a, C.Proj(1, source), C.Let(b, C.Proj(2, source),
                     self.destructure(first, a, scope, after_first)))

    def binder_of(self, pat) -> str | None:
        if isinstance(pat, S.PName):
            if pat.name != "_":
                self.check_binder(pat.name, pat.pos)
            return pat.name
        if isinstance(pat, S.PUnit):
            return "_"
        return None

    def bind_pattern(self, pat, scope, body_se) -> tuple[str, object]:
        """Returns (binder, lowered body) for a single-binder position."""
        name = self.binder_of(pat)
        if name is not None:
            inner = scope | {name} if name != "_" else scope
            return name, self.expr(body_se, inner)
        t = self.fresh()
        return t, self.destructure(pat, t, scope, lambda sc: self.expr(body_se, sc))

    # expressions

    def expr(self, se, scope):
        m = getattr(self, "lower_" + type(se).__name__, None)
        if m is None:
            raise LowerError(f"cannot lower {type(se).__name__}", se.pos)
        return m(se, scope)

    def lower_SVar(self, se, scope):
        self.lookup(se, scope)
        return C.Var(se.name)

    def lower_SInt(self, se, scope):
        if not INT_MIN <= se.value <= INT_MAX:
            raise LowerError(f"integer literal {se.value} out of 64-bit range", se.pos)
        return C.Lit(se.value)

    def lower_SUnit(self, se, scope):
        return C.Lit(0)

    def lower_SRead(self, se, scope):
        return C.Read()

    def lower_SPSet(self, se, scope):
        parties, holders = [], []
        for name in se.members:
            if name in scope:
                holders.append(name)
            elif name in self.principals:
                parties.append(name)
            else:
                raise LowerError(f"undeclared party {name!r}", se.pos)
        if not holders:
            return C.PSetLit(frozenset(parties))
        if not parties and len(holders) == 1:
            return C.Var(holders[0])
        acc_expr = C.PSetLit(frozenset(parties)) if parties else C.Var(holders[0])
        rest = holders if parties else holders[1:]

        def chain(acc_bound, names):
            acc = self.fresh()
            if len(names) == 1:
                return C.Let(acc, acc_bound, C.BinOp("union", acc, names[0]))
            nxt = self.fresh()
            return C.Let(acc, acc_bound, C.Let(nxt, C.BinOp("union", acc, names[0]),
                                               chain(C.Var(nxt), names[1:])))
        return chain(acc_expr, rest)

    def lower_SBinOp(self, se, scope):
        if se.op == ">":
            return self.vars([se.left, se.right], scope, lambda x, y: C.BinOp("lt", y, x))
        op = SURFACE_OPS.get(se.op)
        if op is None:
            raise LowerError(f"unknown operator {se.op!r}", se.pos)
        return self.vars([se.left, se.right], scope, lambda x, y: C.BinOp(op, x, y))

    def lower_SApp(self, se, scope):
        return self.vars([se.fn, se.arg], scope, lambda f, a: C.App(f, a))

    def lower_SFun(self, se, scope):
        return self.function(se.self_name, se.params, se.body, scope, se.pos)

    def function(self, self_name, params, body, scope, pos):
        if self_name is not None:
            self.check_binder(self_name, pos)
            scope = scope | {self_name}
        z = self_name if self_name is not None else "_"
        param, rest = params[0], params[1:]
        name = self.binder_of(param)
        if name is not None:
            inner = scope | {name} if name != "_" else scope
            if rest:
                return C.Fun(z, name, self.function(None, rest, body, inner, pos))
            return C.Fun(z, name, self.expr(body, inner))
        t = self.fresh()

        def k(sc):
            if rest:
                return self.function(None, rest, body, sc, pos)
            return self.expr(body, sc)
        return C.Fun(z, t, self.destructure(param, t, scope, k))

    def lower_SLet(self, se, scope):
        bound = self.expr(se.bound, scope)
        name = self.binder_of(se.pat)
        if name is not None:
            inner = scope | {name} if name != "_" else scope
            return C.Let(name, bound, self.expr(se.body, inner))
        t = self.fresh()
        return C.Let(t, bound, self.destructure(se.pat, t, scope,
                                                lambda sc: self.expr(se.body, sc)))

    def lower_SIf(self, se, scope):
        def k(c):
            s = self.fresh()
            return C.Let(s, C.ToSum(c), C.CaseSum(s, "_", self.expr(se.other, scope),
                                                   "_", self.expr(se.then, scope)))
        return self.var(se.cond, scope, k)

    def lower_SMux(self, se, scope):
        return self.vars([se.cond, se.then, se.other], scope, lambda c, a, b: C.Mux(c, a, b))

    def lower_SPar(self, se, scope):
        return self.var(se.parties, scope, lambda p: C.Par(p, self.expr(se.body, scope)))

    def lower_SCaseSum(self, se, scope):
        def k(x):
            lb, left = self.bind_pattern(se.left_pat, scope, se.left)
            rb, right = self.bind_pattern(se.right_pat, scope, se.right)
            return C.CaseSum(x, lb, left, rb, right)
        return self.var(se.subject, scope, k)

    def lower_SCaseList(self, se, scope):
        def k(x):
            cell = self.fresh()
            cons = self.destructure(S.PTuple([se.head, se.tail], pos=se.pos), cell, scope,
                                    lambda sc: self.expr(se.cons, sc))
            return C.CaseSum(x, "_", self.expr(se.nil, scope), cell, cons)
        return self.var(se.subject, scope, k)

    def lower_SCasePSet(self, se, scope):
        for b in (se.elem, se.rest):
            self.check_binder(b, se.pos)
        if se.elem == se.rest and se.elem != "_":
            raise LowerError("case binders must be distinct", se.pos)

        def k(x):
            inner = scope | {se.elem, se.rest}
            return C.CasePSet(x, self.expr(se.empty, scope), se.elem, se.rest,
                              self.expr(se.nonempty, inner))
        return self.var(se.subject, scope, k)

    def lower_SShare(self, se, scope):
        return self.vars([se.sender, se.receiver, se.arg], scope, C.Share)

    def lower_SReveal(self, se, scope):
        return self.vars([se.sender, se.receiver, se.arg], scope, C.Reveal)

    UNARY = {
        "ref": C.Ref, "deref": C.Deref, "write": C.Write, "tosum": C.ToSum,
        "inj1": lambda x: C.Inj(1, x), "inj2": lambda x: C.Inj(2, x),
        "proj1": lambda x: C.Proj(1, x), "proj2": lambda x: C.Proj(2, x),
    }

    def lower_SUnary(self, se, scope):
        return self.var(se.arg, scope, self.UNARY[se.op])

    def lower_SAssign(self, se, scope):
        return self.vars([se.target, se.value], scope, C.Assign)

    def lower_STuple(self, se, scope):
        items = se.items
        if len(items) == 2:
            return self.vars(items, scope, C.Pair)
        return self.vars([items[0], S.STuple(items[1:], pos=se.pos)], scope, C.Pair)

    def lower_SList(self, se, scope):
        tail = S.SList([], pos=se.pos)
        for item in reversed(se.items):
            tail = S.SCons(item, tail, pos=se.pos)
        if se.items:
            return self.expr(tail, scope)
        z = self.fresh()
        return C.Let(z, C.Lit(0), C.Inj(1, z))

    def lower_SCons(self, se, scope):
        def k(h, t):
            cell = self.fresh()
            return C.Let(cell, C.Pair(h, t), C.Inj(2, cell))
        return self.vars([se.head, se.tail], scope, k)


def _identifiers(text: str) -> set:
    from .parser import tokenize
    return {t.value for t in tokenize(text) if t.kind == "IDENT"}


def _def_binding(lw: Lowerer, d: S.Def, scope):
    if d.brec:
        params = [S.PName(d.name, pos=d.pos)] + d.params
        return lw.function(d.name, params, d.body, scope, d.pos)
    if d.params:
        return lw.function(d.name, d.params, d.body, scope, d.pos)
    return lw.expr(d.body, scope)


@lru_cache(maxsize=1)
def prelude_source() -> str:
    return resources.files("lsym").joinpath("prelude.lsym").read_text()


@lru_cache(maxsize=1)
def _prelude_defs() -> tuple:
    text = prelude_source()
    prog = parse(text)
    lw = Lowerer((), _identifiers(text), temp_prefix="_p")
    out, scope = [], frozenset()
    for d in prog.defs:
        out.append((d.name, _def_binding(lw, d, scope)))
        scope = scope | {d.name}
    return tuple(out)


def prelude_names() -> frozenset:
    return frozenset(name for name, _ in _prelude_defs())


def lower(prog: S.Program, use_prelude: bool = True):
    """Lower a parsed program to a closed ANF core expression."""
    return compile_program(prog, use_prelude).expr


def principals_of(prog: S.Program) -> tuple:
    if prog.principals:
        return tuple(prog.principals)
    found: set = set()

    def walk(x):
        if isinstance(x, S.SPSet):
            found.update(m for m in x.members if m[:1].isupper())
        elif isinstance(x, S.SNode):
            for v in vars(x).values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
    walk(prog.main)
    for d in prog.defs:
        walk(d.body)
    return tuple(sorted(found - _binders_in(prog)))


def _binders_in(prog: S.Program) -> set:
    out: set = set()

    def walk(n):
        if isinstance(n, S.PName):
            out.add(n.name)
        elif isinstance(n, S.SFun) and n.self_name:
            out.add(n.self_name)
        elif isinstance(n, S.SCasePSet):
            out.update((n.elem, n.rest))
        if isinstance(n, (S.SNode, S.Def)):
            for v in vars(n).values():
                walk(v)
        elif isinstance(n, list):
            for v in n:
                walk(v)
    for d in prog.defs:
        out.add(d.name)
        walk(d)
    walk(prog.main)
    return out


def compile_program(prog: S.Program, use_prelude: bool = True) -> CoreProgram:
    principals = principals_of(prog)
    if len(set(principals)) != len(principals):
        raise LowerError("duplicate principal declaration")
    if prog.main is None:
        raise LowerError("program has no main")
    seen: dict = {}
    for d in prog.defs:
        if d.name in seen:
            raise LowerError(f"duplicate definition of {d.name!r}", d.pos)
        seen[d.name] = d
    prelude = _prelude_defs() if use_prelude else ()
    reserved = set(seen) | {n for n, _ in prelude}
    for d in prog.defs:
        reserved |= _names_in(d)
    reserved |= _names_in(prog.main)
    lw = Lowerer(principals, reserved)
    scope = frozenset(n for n, _ in prelude)
    user = []
    for d in prog.defs:
        if d.name == "main":
            continue
        lw.check_binder(d.name, d.pos)
        user.append((d.name, _def_binding(lw, d, scope)))
        scope = scope | {d.name}
    body = lw.expr(prog.main, scope)
    for name, bound in reversed(user):
        body = C.Let(name, bound, body)
    needed = set(C.free_vars(body))
    kept = []
    for name, bound in reversed(prelude):
        if name in needed:
            needed.discard(name)
            needed |= C.free_vars(bound)
            kept.append((name, bound))
    for name, bound in kept:
        body = C.Let(name, bound, body)
    stray = C.party_literals(body) - set(principals)
    if stray:
        raise LowerError(f"undeclared parties {sorted(stray)}")
    return CoreProgram(principals, body)


def _names_in(x) -> set:
    out: set = set()

    def walk(n):
        if isinstance(n, (S.SVar, S.PName)):
            out.add(n.name)
        elif isinstance(n, (S.SNode, S.Def)):
            for v in vars(n).values():
                walk(v)
        elif isinstance(n, list):
            for v in n:
                walk(v)
        elif isinstance(n, str):
            out.add(n)
    walk(x)
    return out


def compile_source(text: str, use_prelude: bool = True) -> CoreProgram:
    return compile_program(parse(text), use_prelude)


__all__ = ["CoreProgram", "LowerError", "ParseError", "compile_program", "compile_source",
           "lower", "prelude_names"]
