"""Core terms back to surface text that lowers to an alpha-equivalent term."""
from __future__ import annotations

from . import core as C

OP_SPELLING = {
    "add": "+", "sub": "-", "mul": "*", "mod": "%", "eq": "==", "lt": "<", "le": "<=",
    "ge": ">=", "and": "&&", "or": "||", "xor": "^", "union": "\\/",
}


def pset_text(parties) -> str:
    return "{" + ",".join(sorted(parties)) + "}"


def atom_text(a) -> str:
    """Single-line rendering of an atom whose function bodies are elided."""
    if isinstance(a, C.Fun):
        return f"fun [{a.self_name}] {a.param} -> ..."
    return _atom(a, 0)


def _atom(a, ind: int) -> str:
    t = type(a)
    if t is C.Var:
        return a.name
    if t is C.Lit:
        return str(a.value)
    if t is C.PSetLit:
        return pset_text(a.parties)
    if t is C.BinOp:
        return f"{a.left} {OP_SPELLING[a.op]} {a.right}"
    if t is C.Mux:
        return f"mux if {a.cond} then {a.then} else {a.other}"
    if t is C.Inj:
        return f"inj{a.index} {a.arg}"
    if t is C.Pair:
        return f"({a.left}, {a.right})"
    if t is C.Proj:
        return f"proj{a.index} {a.arg}"
    if t is C.Fun:
        head = f"fun [{a.self_name}] {a.param} ->"
        if C.is_atom(a.body) and not isinstance(a.body, C.Fun):
            return f"{head} {_atom(a.body, ind)}"
        return f"{head}\n{' ' * (ind + 2)}{_expr(a.body, ind + 2)}"
    if t is C.Ref:
        return f"ref {a.arg}"
    if t is C.Deref:
        return f"!{a.arg}"
    if t is C.Assign:
        return f"{a.target} := {a.value}"
    if t is C.Read:
        return "read"
    if t is C.Write:
        return f"write {a.arg}"
    if t is C.Share:
        return f"share [{a.sender} -> {a.receiver}] {a.arg}"
    if t is C.Reveal:
        return f"reveal [{a.sender} -> {a.receiver}] {a.arg}"
    if t is C.ToSum:
        return f"tosum {a.arg}"
    raise TypeError(f"not an atom: {a!r}")


def _simple(e) -> bool:
    return C.is_atom(e) and not isinstance(e, C.Fun)


def _expr(e, ind: int) -> str:
    pad = " " * ind
    t = type(e)
    if t is C.Let:
        if _simple(e.bound):
            first = f"let {e.name} = {_atom(e.bound, ind)} in"
        else:
            first = (f"let {e.name} =\n{pad}  {_expr(e.bound, ind + 2)}\n{pad}in")
        return f"{first}\n{pad}{_expr(e.body, ind)}"
    if t is C.App:
        return f"{e.fn} {e.arg}"
    if t is C.Par:
        return f"par {e.parties}\n{pad}  {_expr(e.body, ind + 2)}"
    if t is C.CaseSum:
        inner = " " * (ind + 4)
        return (f"case {e.subject} {{\n{pad}  inl {e.left_binder} ->\n{inner}{_expr(e.left, ind + 4)}\n"
                f"{pad}; inr {e.right_binder} ->\n{inner}{_expr(e.right, ind + 4)}\n{pad}}}")
    if t is C.CasePSet:
        inner = " " * (ind + 4)
        return (f"case {e.subject} {{\n{pad}  {{}} ->\n{inner}{_expr(e.empty, ind + 4)}\n"
                f"{pad}; {{{e.elem_binder}}} \\/ {e.rest_binder} ->\n{inner}"
                f"{_expr(e.nonempty, ind + 4)}\n{pad}}}")
    return _atom(e, ind)


def pretty(e) -> str:
    """Render a core term as parseable surface text."""
    return _expr(e, 0)


def pretty_program(principals, e) -> str:
    head = f"principal {' '.join(principals)}\n\n" if principals else ""
    return f"{head}def main () =\n  {_expr(e, 2)}\n"


def head_text(e) -> str:
    """One-line summary of the next redex, used by traces."""
    t = type(e)
    if t is C.Let:
        return f"let {e.name} = {head_text(e.bound)} in ..."
    if t is C.App:
        return f"{e.fn} {e.arg}"
    if t is C.Par:
        return f"par {e.parties} ..."
    if t is C.CaseSum:
        return f"case {e.subject} {{inl {e.left_binder} ; inr {e.right_binder}}}"
    if t is C.CasePSet:
        return f"case {e.subject} {{{{}} ; {{{e.elem_binder}}} \\/ {e.rest_binder}}}"
    return atom_text(e)
