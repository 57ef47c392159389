"""ANF core terms. Every operand position holds a variable name."""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Union

PartySet = frozenset

INT_OPS = ("add", "sub", "mul", "mod", "eq", "lt", "le", "ge", "and", "or", "xor")
BIN_OPS = INT_OPS + ("union",)


def _cached_hash(self) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_hash", h)
    return h


def node(cls):
    """Frozen structural dataclass whose hash is computed once."""
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    return cls


# atoms

@node
class Var:
    name: str


@node
class Lit:
    value: int


@node
class PSetLit:
    parties: frozenset


@node
class BinOp:
    op: str
    left: str
    right: str


@node
class Mux:
    cond: str
    then: str
    other: str


@node
class Inj:
    index: int
    arg: str


@node
class Pair:
    left: str
    right: str


@node
class Proj:
    index: int
    arg: str


@node
class Fun:
    self_name: str
    param: str
    body: "Expr"


@node
class Ref:
    arg: str


@node
class Deref:
    arg: str


@node
class Assign:
    target: str
    value: str


@node
class Read:
    pass


@node
class Write:
    arg: str


@node
class Share:
    sender: str
    receiver: str
    arg: str


@node
class Reveal:
    sender: str
    receiver: str
    arg: str


@node
class ToSum:
    """Clear integer to the boolean sum: zero is inj1 0, anything else inj2 0."""
    arg: str


# compound expressions

@node
class CaseSum:
    subject: str
    left_binder: str
    left: "Expr"
    right_binder: str
    right: "Expr"


@node
class CasePSet:
    subject: str
    empty: "Expr"
    elem_binder: str
    rest_binder: str
    nonempty: "Expr"


@node
class App:
    fn: str
    arg: str


@node
class Par:
    parties: str
    body: "Expr"


@node
class Let:
    name: str
    bound: "Expr"
    body: "Expr"


Atom = Union[Var, Lit, PSetLit, BinOp, Mux, Inj, Pair, Proj, Fun, Ref, Deref,
             Assign, Read, Write, Share, Reveal, ToSum]
Expr = Union[Atom, CaseSum, CasePSet, App, Par, Let]

ATOM_TYPES = (Var, Lit, PSetLit, BinOp, Mux, Inj, Pair, Proj, Fun, Ref, Deref,
              Assign, Read, Write, Share, Reveal, ToSum)
SYNC_TYPES = (Share, Reveal)


def is_atom(e) -> bool:
    return isinstance(e, ATOM_TYPES)


def operands(a) -> tuple[str, ...]:
    """Variable operands of an atom, left to right."""
    if isinstance(a, Var):
        return (a.name,)
    if isinstance(a, (BinOp, Pair)):
        return (a.left, a.right)
    if isinstance(a, Mux):
        return (a.cond, a.then, a.other)
    if isinstance(a, (Inj, Proj, Ref, Deref, Write, ToSum)):
        return (a.arg,)
    if isinstance(a, Assign):
        return (a.target, a.value)
    if isinstance(a, (Share, Reveal)):
        return (a.sender, a.receiver, a.arg)
    return ()


def free_vars(e) -> frozenset:
    """Free variables of a core term; a par's party operand counts as a use."""
    if isinstance(e, Fun):
        return free_vars(e.body) - {e.self_name, e.param}
    if is_atom(e):
        return frozenset(operands(e))
    if isinstance(e, CaseSum):
        return (frozenset({e.subject}) | (free_vars(e.left) - {e.left_binder})
                | (free_vars(e.right) - {e.right_binder}))
    if isinstance(e, CasePSet):
        return (frozenset({e.subject}) | free_vars(e.empty)
                | (free_vars(e.nonempty) - {e.elem_binder, e.rest_binder}))
    if isinstance(e, App):
        return frozenset({e.fn, e.arg})
    if isinstance(e, Par):
        return frozenset({e.parties}) | free_vars(e.body)
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    raise TypeError(f"not a core term: {e!r}")


def subterms(e):
    """Pre-order walk over every core node."""
    stack = [e]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, Fun):
            stack.append(t.body)
        elif isinstance(t, CaseSum):
            stack.extend((t.right, t.left))
        elif isinstance(t, CasePSet):
            stack.extend((t.nonempty, t.empty))
        elif isinstance(t, Par):
            stack.append(t.body)
        elif isinstance(t, Let):
            stack.extend((t.body, t.bound))


def size(e) -> int:
    return sum(1 for _ in subterms(e))


def party_literals(e) -> frozenset:
    out: set = set()
    for t in subterms(e):
        if isinstance(t, PSetLit):
            out |= t.parties
    return frozenset(out)


def alpha_eq(a, b) -> bool:
    """Structural equality up to consistent renaming of bound variables."""
    return _alpha(a, b, {}, {})


def _alpha(a, b, ma: dict, mb: dict) -> bool:
    if type(a) is not type(b):
        return False

    def same(x, y):
        return ma.get(x, ("free", x)) == mb.get(y, ("free", y))

    def bind(names_a, names_b):
        ka, kb = dict(ma), dict(mb)
        for x, y in zip(names_a, names_b):
            tag = object()
            ka[x] = tag
            kb[y] = tag
        return ka, kb

    if isinstance(a, Fun):
        # the parameter is bound after the self name, so it shadows on a clash
        ka, kb = bind((a.self_name,), (b.self_name,))
        ka2, kb2 = dict(ka), dict(kb)
        tag = ("param", object())
        ka2[a.param] = tag
        kb2[b.param] = tag
        return _alpha(a.body, b.body, ka2, kb2)
    if isinstance(a, Let):
        if not _alpha(a.bound, b.bound, ma, mb):
            return False
        ka, kb = bind((a.name,), (b.name,))
        return _alpha(a.body, b.body, ka, kb)
    if isinstance(a, CaseSum):
        if not same(a.subject, b.subject):
            return False
        la, lb = bind((a.left_binder,), (b.left_binder,))
        ra, rb = bind((a.right_binder,), (b.right_binder,))
        return _alpha(a.left, b.left, la, lb) and _alpha(a.right, b.right, ra, rb)
    if isinstance(a, CasePSet):
        if not same(a.subject, b.subject) or not _alpha(a.empty, b.empty, ma, mb):
            return False
        ka, kb = bind((a.elem_binder, a.rest_binder), (b.elem_binder, b.rest_binder))
        return _alpha(a.nonempty, b.nonempty, ka, kb)
    if isinstance(a, Par):
        return same(a.parties, b.parties) and _alpha(a.body, b.body, ma, mb)
    if isinstance(a, App):
        return same(a.fn, b.fn) and same(a.arg, b.arg)
    if isinstance(a, Lit):
        return a.value == b.value
    if isinstance(a, PSetLit):
        return a.parties == b.parties
    if isinstance(a, (BinOp,)) and a.op != b.op:
        return False
    if isinstance(a, (Inj, Proj)) and a.index != b.index:
        return False
    oa, ob = operands(a), operands(b)
    return len(oa) == len(ob) and all(same(x, y) for x, y in zip(oa, ob))
