import pytest
from hypothesis import given, settings, strategies as st

from lsym.corpus import corpus_list
from lsym.harness.generator import TermGenerator
from lsym.syntax import (LowerError, ParseError, alpha_eq, compile_source, core as C, free_vars,
                         parse, parse_expr, pretty, pretty_program)
from lsym.syntax.core import ATOM_TYPES, party_literals, subterms


def test_parse_smallest_par():
    p = parse("principal A\ndef main () = par {A} 1")
    assert p.principals == ["A"]
    assert type(p.main).__name__ == "SPar"
    assert p.main.body.value == 1


def test_parse_millionaires_shape(corpus):
    p = parse(corpus["millionaires"].source)
    assert p.principals == ["A", "B"]
    assert type(p.main).__name__ == "SPar"
    assert p.main.parties.members == ["A", "B"]


def test_parse_error_points_at_in():
    with pytest.raises(ParseError) as ei:
        parse("principal A\ndef main () = let x = in 3")
    e = ei.value
    assert (e.line, e.col) == (2, 23)
    assert "identifier" in e.expected and "'in'" in str(e)


def test_party_keyword_accepted():
    assert parse("party A B\ndef main () = 1").principals == ["A", "B"]


def test_anf_introduction():
    e = compile_source("principal A\ndef main () = 1 + 2").expr
    want = C.Let("a", C.Lit(1), C.Let("b", C.Lit(2), C.BinOp("add", "a", "b")))
    assert alpha_eq(e, want)


def test_nil_is_inj1_zero():
    e = compile_source("principal A\ndef main () = []").expr
    assert alpha_eq(e, C.Let("z", C.Lit(0), C.Inj(1, "z")))


def test_brec_first_parameter_shadows_the_name():
    e = compile_source("principal A\ndef brec f x = f x\ndef main () = f 1", use_prelude=False).expr
    assert type(e) is C.Let and e.name == "f"
    fun = e.bound
    assert fun.self_name == "f" and fun.param == "f"
    assert fun.body.param == "x"


def test_true_false_are_integers():
    e = compile_source("principal A\ndef main () = true").expr
    assert e == C.Lit(1)


@pytest.mark.parametrize("src,msg", [
    ("principal A\ndef main () = y", "unbound"),
    ("principal A\ndef main () = par {C} 1", "undeclared party"),
    ("principal A\ndef f x = x\ndef f y = y\ndef main () = 1", "duplicate"),
])
def test_lowering_errors(src, msg):
    with pytest.raises(LowerError, match=msg):
        compile_source(src)


def test_free_vars_examples():
    assert free_vars(C.Fun("z", "x", C.App("z", "x"))) == frozenset()
    assert free_vars(C.Let("x", C.Var("y"), C.Var("x"))) == {"y"}
    assert free_vars(C.CaseSum("x", "y", C.Var("y"), "z", C.Var("w"))) == {"x", "w"}
    assert free_vars(C.Par("p", C.Lit(1))) == {"p"}
    assert free_vars(C.CasePSet("s", C.Var("a"), "h", "t", C.Pair("h", "t"))) == {"s", "a"}


def test_pretty_injection():
    assert pretty(C.Inj(1, "x")) == "inj1 x"


OPERAND_FIELDS = {C.CaseSum: ("subject",), C.CasePSet: ("subject",), C.App: ("fn", "arg"),
                  C.Par: ("parties",)}


def _anf_ok(e) -> bool:
    for t in subterms(e):
        if C.is_atom(t):
            if not all(type(x) is str for x in C.operands(t)):
                return False
        elif not all(type(getattr(t, f)) is str for f in OPERAND_FIELDS.get(type(t), ())):
            return False
    return True


def test_corpus_round_trips_and_is_closed():
    for entry in corpus_list():
        p = entry.compile()
        text = pretty_program(p.principals, p.expr)
        again = compile_source(text, use_prelude=False)
        assert alpha_eq(again.expr, p.expr), entry.name
        # a second round trip is textually stable
        assert pretty_program(again.principals, again.expr) == text
        assert free_vars(p.expr) == frozenset(), entry.name
        assert party_literals(p.expr) <= set(p.principals), entry.name
        assert _anf_ok(p.expr), entry.name


def test_readshare_pretty_is_stable():
    src = """principal A B C
def readShare Q p = par ({p} \\/ Q)
  let i = par p read in
  share [gmw, int : p -> Q] i
def main () = readShare {B,C} {A}
"""
    p = compile_source(src, use_prelude=False)
    once = pretty_program(p.principals, p.expr)
    twice = compile_source(once, use_prelude=False)
    assert pretty_program(twice.principals, twice.expr) == once


def test_share_annotations_are_inert():
    a = compile_source("principal A B\ndef main () = share [gmw, int : {A} -> {A,B}] 1").expr
    b = compile_source("principal A B\ndef main () = share [{A} -> {A,B}] 1").expr
    assert alpha_eq(a, b)


def test_parse_expr_entry_point():
    assert type(parse_expr("let x = 1 in x")).__name__ == "SLet"


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_generated_terms_round_trip(seed):
    g = TermGenerator(seed, max_size=30).generate()
    text = pretty_program(g.principals, g.expr)
    assert alpha_eq(compile_source(text, use_prelude=False).expr, g.expr)
    assert all(isinstance(t, ATOM_TYPES) or not C.is_atom(t) for t in subterms(g.expr))
