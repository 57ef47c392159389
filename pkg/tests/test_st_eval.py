import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import program
from lsym import st_eval as S
from lsym.harness.generator import TermGenerator
from lsym.syntax import core as C
from lsym.values import STAR, Enc, IntV, Located, PSetV, RefV, initial_st, show

A, B, AB = frozenset("A"), frozenset("B"), frozenset("AB")


def at(u, parties):
    return Located(u, frozenset(parties))


def run(src, fuel=100_000, check=True, **inputs):
    p = program(src)
    return S.run_expr(p.expr, p.principals, S.InputOracle.of(**inputs), fuel, check=check)


WORKED = """principal A B C
def main () = par {A,B}
  let x = par {A} 1 in
  let y = par {B} x in
  let z = par {C} 2 in
  x
"""


def test_var_outside_location_is_star():
    _, v = S.st_atomic({"x": at(IntV(1), "A")}, B, {}, C.Var("x"))
    assert v is STAR


def test_share_atom():
    env = {"p": at(PSetV(A), "AB"), "q": at(PSetV(AB), "AB"), "x": at(IntV(5), "A")}
    _, v = S.st_atomic(env, AB, {}, C.Share("p", "q", "x"))
    assert v == at(IntV(5, Enc(AB)), "AB")


def test_share_requires_mode_union():
    env = {"p": at(PSetV(A), "A"), "q": at(PSetV(A), "A"), "x": at(IntV(5), "A")}
    _, v = S.st_atomic(env, A, {}, C.Share("p", "q", "x"))
    assert v == at(IntV(5, Enc(A)), "A")
    env = {"p": at(PSetV(A), "AB"), "q": at(PSetV(A), "AB"), "x": at(IntV(5), "A")}
    with pytest.raises(S.Stuck):
        S.st_atomic(env, AB, {}, C.Share("p", "q", "x"))


def test_assign_creator_mismatch_is_stuck():
    env = {"r": at(RefV(0, AB), "A"), "v": at(IntV(1), "A")}
    with pytest.raises(S.Stuck) as ei:
        S.st_atomic(env, A, {0: (AB, at(IntV(0), "AB"))}, C.Assign("r", "v"))
    assert ei.value.rule == "ST-ASSIGN"


def test_encrypted_comparison():
    env = {"a": at(IntV(3, Enc(AB)), "AB"), "b": at(IntV(4, Enc(AB)), "AB")}
    _, v = S.st_atomic(env, AB, {}, C.BinOp("ge", "a", "b"))
    assert v == at(IntV(0, Enc(AB)), "AB")


def test_binop_location_mismatch_diagnostic():
    env = {"a": at(IntV(3), "A"), "b": at(IntV(4), "AB")}
    with pytest.raises(S.Stuck, match=r"expected .* at \{A,B\}, found \{A\}"):
        S.st_atomic(env, AB, {}, C.BinOp("add", "a", "b"))


def test_protocol_mismatch_is_stuck():
    env = {"a": at(IntV(3, Enc(AB)), "AB"), "b": at(IntV(4), "AB")}
    with pytest.raises(S.Stuck):
        S.st_atomic(env, AB, {}, C.BinOp("add", "a", "b"))


def test_read_and_write_need_a_single_party():
    io = S.InputOracle.of(A=[9])
    _, v = S.st_atomic({}, A, {}, C.Read(), io)
    assert v == at(IntV(9), "A")
    with pytest.raises(S.Stuck):
        S.st_atomic({}, AB, {}, C.Read(), io)
    _, v = S.st_atomic({"x": at(IntV(3), "A")}, A, {}, C.Write("x"))
    assert v == at(IntV(0), "A")


def test_exhausted_input_is_stuck():
    r = run("principal A\ndef main () = par {A} (read + read)", A=[1])
    assert type(r) is S.StuckState and r.rule == "ST-READ"


def test_worked_example():
    p = program(WORKED)
    z = initial_st(p.principals, p.expr)
    seen = {}
    while True:
        r = S.st_step(z)
        if type(r) is not S.Stepped:
            break
        z = r.config
        seen.update({x: v for x, v in z.env.items() if x in "xyz"})
    assert type(r) is S.Terminal
    assert r.value == at(IntV(1), "A")
    assert seen["y"] is STAR and seen["z"] is STAR
    assert seen["x"] == at(IntV(1), "A")


def test_par_with_no_overlap_binds_star():
    z = initial_st(AB, C.Let("p", C.PSetLit(frozenset("C")), C.Par("p", C.Lit(2))))
    z = S.st_step(z).config               # push
    z = S.st_step(z).config               # pop, p bound
    r = S.st_step(z)
    assert r.rule == "ST-PAREMPTY"
    fresh = r.config.expr.name
    assert r.config.env[fresh] is STAR


def test_reference_program_gets_stuck(corpus):
    e = corpus["stuck-assign"]
    p = e.compile()
    r = S.run_expr(p.expr, p.principals, e.manifest.oracle())
    assert type(r) is S.StuckState and r.rule == "ST-ASSIGN"
    assert "creators" in r.reason


def test_millionaires(corpus):
    p = corpus["millionaires"].compile()
    r = S.run_expr(p.expr, p.principals, S.InputOracle.of(A=[10], B=[5]))
    assert r.value == at(IntV(1), "AB")


def test_gcd_program(corpus):
    e = corpus["gcd"]
    p = e.compile()
    r = S.run_expr(p.expr, p.principals, S.InputOracle.of(A=[12], B=[18]))
    assert r.value == at(IntV(math.gcd(12, 18)), "AB")


def test_self_application_runs_out_of_fuel():
    r = run("principal A\ndef main () = let w = fun [w] x -> w x in w 0", fuel=500)
    assert type(r) is S.OutOfFuel and r.steps == 500


def test_mux_and_cond():
    assert run("principal A\ndef main () = mux if 3 then 4 else 5").value.u == IntV(4)
    assert run("principal A\ndef main () = mux if 0 then 4 else 5").value.u == IntV(5)


def test_integer_semantics():
    big = (1 << 63) - 1
    assert run(f"principal A\ndef main () = {big} + 1").value.u == IntV(-(1 << 63))
    assert run("principal A\ndef main () = 7 % 0").value.u == IntV(7)
    assert run("principal A\ndef main () = 7 < 9").value.u == IntV(1)


def test_if_on_encrypted_value_is_stuck():
    r = run("principal A B\ndef main () = par {A,B} "
            "(let s = share [{A} -> {A,B}] (par {A} 1) in if s then 1 else 2)")
    assert type(r) is S.StuckState and "encrypted" in r.reason


def test_write_outputs_are_collected():
    r = run("principal A\ndef main () = par {A} (let _ = write 4 in write 5)")
    assert r.outputs == {"A": (4, 5)}


def test_trace_format_is_stable():
    lines = []
    p = program(WORKED)
    S.run_expr(p.expr, p.principals, trace=lines.append)
    assert lines[0].split()[:3] == ["1", "ST-LETPUSH", "{A,B,C}"]
    again = []
    S.run_expr(p.expr, p.principals, trace=again.append)
    assert lines == again


def test_distinct_inputs_change_the_result(corpus):
    p = corpus["millionaires"].compile()
    a = S.run_expr(p.expr, p.principals, S.InputOracle.of(A=[10], B=[5]))
    b = S.run_expr(p.expr, p.principals, S.InputOracle.of(A=[1], B=[5]))
    assert show(a.value) != show(b.value)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_terms_keep_step_invariants(seed):
    g = TermGenerator(seed).generate()
    r1 = S.run_expr(g.expr, g.principals, g.io, 5000, check=True)
    r2 = S.run_expr(g.expr, g.principals, g.io, 5000)
    assert type(r1) is type(r2) and r1.steps == r2.steps
    if type(r1) is S.Terminal:
        assert r1.value == r2.value
        assert r1.config.stack == () and C.is_atom(r1.config.expr)
