import pytest
from hypothesis import given, settings, strategies as st

from conftest import program
from lsym import ds_eval as D
from lsym import st_eval as S
from lsym.harness.checks import st_terminal_views, ds_terminal_views
from lsym.harness.generator import TermGenerator
from lsym.netshare import ConcreteBackend
from lsym.syntax import core as C
from lsym.values import STAR, Enc, IntV, LocalConfig, PSetV, slice_config

A, AB = frozenset("A"), frozenset("AB")

WORKED = """principal A B C
def main () = par {A,B}
  let x = par {A} 1 in
  let y = par {B} x in
  let z = par {C} 2 in
  x
"""


def ds(src, sched=None, fuel=100_000, backend=None, **inputs):
    p = program(src)
    return D.run_expr(p.expr, p.principals, sched, S.InputOracle.of(**inputs), fuel,
                      backend=backend)


def test_star_cannot_be_eliminated():
    with pytest.raises(S.Stuck):
        D.ds_atomic({"x": STAR}, AB, {}, C.BinOp("add", "x", "x"), party="A")


def test_share_arithmetic_needs_all_owners():
    env = {"x": IntV(5, Enc(AB))}
    with pytest.raises(S.Stuck):
        D.ds_atomic(env, A, {}, C.BinOp("add", "x", "x"), party="A")
    _, v = D.ds_atomic(env, AB, {}, C.BinOp("add", "x", "x"), party="A")
    assert v == IntV(10, Enc(AB))


def test_var_is_returned_unchanged():
    _, v = D.ds_atomic({"x": IntV(7)}, A, {}, C.Var("x"), party="A")
    assert v == IntV(7)


def test_sync_atoms_are_rejected_by_the_atomic_judgment():
    with pytest.raises(ValueError):
        D.ds_atomic({}, AB, {}, C.Share("p", "q", "x"), party="A")


def _drive_alone(z):
    while True:
        r = D.local_step(z)
        if type(r) is not D.LStepped:
            return r
        z = r.config


def test_slice_of_worked_example_runs_alone():
    p = program(WORKED)
    r = _drive_alone(D.initial_ds(p.principals, p.expr)["A"])
    assert type(r) is D.LocalTerminal and r.value == IntV(1)
    r = _drive_alone(D.initial_ds(p.principals, p.expr)["B"])
    assert type(r) is D.LocalTerminal and r.value is STAR


def test_party_outside_par_skips_to_star():
    z = LocalConfig("B", AB, {"p": PSetV(A)}, {}, (), C.Par("p", C.Lit(1)))
    r = D.local_step(z)
    assert r.rule == "DS-PAREMPTY"
    assert r.config.env[r.config.expr.name] is STAR


def test_share_head_parks_without_change():
    env = {"p": PSetV(A), "q": PSetV(AB), "x": IntV(5)}
    z = LocalConfig("A", AB, env, {}, (), C.Share("p", "q", "x"))
    r = D.local_step(z)
    assert type(r) is D.NeedsSync and r.kind == "share" and r.payload == IntV(5)
    assert z.env == env and type(z.expr) is C.Share


def test_share_sync_binds_both_parties():
    src = "principal A B\ndef main () = par {A,B} share [{A} -> {A,B}] (par {A} 5)"
    r = ds(src)
    assert type(r) is D.Terminal
    assert r.values == {"A": IntV(5, Enc(AB)), "B": IntV(5, Enc(AB))}


def test_delegation_gives_stars_to_providers(corpus):
    e = corpus["delegation"]
    p = e.compile()
    r = D.run_expr(p.expr, p.principals, D.SeededRandom(1), e.manifest.oracle())
    assert type(r) is D.Terminal
    for a in "ABCD":
        assert r.values[a] == IntV(1)
    for a in "EF":
        assert r.values[a] is STAR


def test_reveal_of_clear_value_is_locally_stuck():
    src = "principal A B\ndef main () = par {A,B} reveal [{A} -> {A,B}] (par {A} 5)"
    r = ds(src)
    assert type(r) is D.LocallyStuck and r.witness == "A"
    assert "DS-REVEAL" in r.diagnostic


def test_disagreeing_views_are_stuck():
    # B believes the sender set is {B}; the two parked views differ
    env_a = {"p": PSetV(A), "q": PSetV(AB), "x": IntV(1)}
    env_b = {"p": PSetV(frozenset("B")), "q": PSetV(AB), "x": IntV(1)}
    e = C.Share("p", "q", "x")
    cfgs = {"A": LocalConfig("A", AB, env_a, {}, (), e), "B": LocalConfig("B", AB, env_b, {}, (), e)}
    r = D.ds_run(cfgs)
    assert type(r) is D.LocallyStuck
    assert set(r.stuck) == {"A", "B"} and "disagree" in r.diagnostic


def test_round_robin_millionaires(corpus):
    p = corpus["millionaires"].compile()
    r = D.run_expr(p.expr, p.principals, D.RoundRobin(), S.InputOracle.of(A=[10], B=[5]))
    assert r.values == {"A": IntV(1), "B": IntV(1)}
    assert r.reveals == [1]


def test_scripted_schedule_starving_a_party():
    src = "principal A B\ndef main () = par {A,B} share [{A} -> {A,B}] (par {A} 5)"
    r = ds(src, D.Scripted(["A"] * 40))
    assert type(r) is D.Starved and r.party == "A"


def test_scripted_schedule_then_round_robin():
    r = ds(WORKED, D.Scripted(D.parse_schedule("B, B # then the rest\nA")))
    assert type(r) is D.Terminal and r.values["A"] == IntV(1)


def test_stuck_party_while_other_spins(corpus):
    e = corpus["diverge-stuck"]
    p = e.compile()
    r = D.run_expr(p.expr, p.principals, D.SeededRandom(0), fuel=3000, stop_on_stuck=False)
    assert type(r) is D.OutOfFuel
    assert set(r.sim.stuck()) == {"A"}
    assert len(r.sim.rule_log["B"]) > 2000


def test_seeds_agree_on_end_state(corpus):
    p = corpus["par-scoping"].compile()
    keys = {D.canonical_dist(D.run_expr(p.expr, p.principals, D.SeededRandom(s)).configs)
            for s in range(1, 101)}
    assert len(keys) == 1


def test_stuck_assignment_under_seeds(corpus):
    p = corpus["stuck-assign"].compile()
    for s in range(20):
        r = D.run_expr(p.expr, p.principals, D.SeededRandom(s))
        assert type(r) is D.LocallyStuck and "DS-ASSIGN" in r.diagnostic


def test_literal_main_terminates_in_one_step_per_party():
    r = ds("principal A B C\ndef main () = 4")
    assert type(r) is D.Terminal and r.steps == 0
    assert all(v == IntV(4) for v in r.values.values())


def test_exhaustive_is_not_a_run_scheduler():
    with pytest.raises(TypeError):
        ds("principal A\ndef main () = 1", D.Exhaustive(4))


def test_successor_counts():
    p = program("principal A B\ndef main () = let x = 1 in x")
    succ = D.enumerate_successors(D.initial_ds(p.principals, p.expr))
    assert len(succ) == 2
    src = "principal A B\ndef main () = par {A,B} share [{A} -> {A,B}] (par {A} 5)"
    p = program(src)
    sim = D.Simulation(D.initial_ds(p.principals, p.expr))
    while any(type(a) is str for a in sim.actors()):
        sim.fire(next(a for a in sim.actors() if type(a) is str))
    assert len(D.successors(sim)) == 1
    p = program("principal A B\ndef main () = 1")
    r = D.run_expr(p.expr, p.principals)
    assert D.enumerate_successors(r.configs) == {}


def test_exploration_bounds():
    p = program("principal A B C D\ndef main () = 1")
    with pytest.raises(D.BoundExceeded):
        D.explore(D.initial_ds(p.principals, p.expr))


def test_trace_lines():
    lines = []
    src = "principal A B\ndef main () = par {A,B} share [{A} -> {A,B}] (par {A} 5)"
    p = program(src)
    D.run_expr(p.expr, p.principals, trace=lines.append)
    sync = [l for l in lines if "SYNC{A,B}" in l]
    assert len(sync) == 1 and "DS-SHARE" in sync[0]
    assert lines[0] == D.trace_line(1, "A", "DS-LETPUSH", AB)


def test_concrete_mode_holds_distinct_words(corpus):
    p = corpus["reshare"].compile()
    io = corpus["reshare"].manifest.oracle()
    a = D.run_expr(p.expr, p.principals, D.SeededRandom(3), io)
    c = D.run_expr(p.expr, p.principals, D.SeededRandom(3), io, backend=ConcreteBackend(7))
    assert a.reveals == c.reveals
    assert [v for v in a.values.values()] == [v for v in c.values.values()]


def _seed_runs(g, seeds):
    return [D.run_expr(g.expr, g.principals, D.SeededRandom(s), g.io, 5000) for s in seeds]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_terms_correspond(seed):
    g = TermGenerator(seed).generate()
    r = S.run_expr(g.expr, g.principals, g.io, 5000)
    runs = _seed_runs(g, range(4))
    if type(r) is S.Terminal:
        want = st_terminal_views(r)
        for d in runs:
            assert type(d) is D.Terminal
            assert ds_terminal_views(d) == want
        # each party's local rule sequence is schedule-independent
        logs = {tuple(sorted((a, tuple(l)) for a, l in d.sim.rule_log.items())) for d in runs}
        assert len(logs) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_stuck_terms(seed):
    g = TermGenerator(seed, stuck=True).generate()
    r = S.run_expr(g.expr, g.principals, g.io, 5000)
    assert type(r) is S.StuckState
    for d in _seed_runs(g, range(3)):
        assert type(d) is D.LocallyStuck


def test_slice_of_initial_matches_initial_ds():
    p = program(WORKED)
    z = S.initial_st(p.principals, p.expr)
    assert slice_config(z) == D.initial_ds(p.principals, p.expr)
