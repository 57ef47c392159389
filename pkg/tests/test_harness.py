import pytest

from lsym import ds_eval as D
from lsym import st_eval as S
from lsym.corpus import corpus_list, entry
from lsym.harness import checks as K
from lsym.harness import report
from lsym.harness.generator import PRODUCTIONS, TermGenerator, coverage, generate_many
from lsym.syntax import alpha_eq, compile_source, pretty_program
from lsym.syntax.core import party_literals, size
from lsym.values import IntV


def subject(name):
    e = entry(name)
    p = e.compile()
    return K.Subject(name, p.expr, p.principals, e.manifest.oracle(), e.manifest.fuel)


def test_generator_is_seed_deterministic():
    a, b = TermGenerator(17).generate(), TermGenerator(17).generate()
    assert a.expr == b.expr and a.io == b.io
    assert TermGenerator(18).generate().expr != a.expr


def test_generated_terms_respect_bounds():
    for g in generate_many(100, 3):
        assert len(g.principals) <= 4
        assert party_literals(g.expr) <= set(g.principals)
        assert size(g.expr) <= 80
        back = compile_source(pretty_program(g.principals, g.expr), use_prelude=False)
        assert alpha_eq(back.expr, g.expr)


def test_generator_covers_every_production():
    assert coverage(generate_many(100, 0)) == set()
    assert set(PRODUCTIONS) >= {"Share", "Reveal", "Par", "CasePSet"}


def test_io_free_mode():
    for g in generate_many(30, 5, io=False):
        r = S.run_expr(g.expr, g.principals, g.io, 5000)
        assert type(r) is not S.StuckState


def test_worked_example_correspondence():
    r = K.check_terminal_correspondence(subject("par-scoping"), range(10))
    assert r.verdict == K.PASS


def test_millionaires_checks():
    subj = subject("millionaires")
    assert K.check_terminal_correspondence(subj, range(5)).ok
    assert K.check_confluence(subj, range(1, 101)).verdict == K.PASS
    assert K.check_diamond(subj).verdict == K.PASS


def test_delegation_confluence():
    assert K.check_confluence(subject("delegation"), range(10)).verdict == K.PASS


def test_stuck_checks():
    subj = subject("stuck-assign")
    r = K.check_stuck_soundness(subj, range(10))
    assert r.verdict == K.PASS and "ST-ASSIGN" in r.detail
    assert K.check_stuck_preservation(subj, range(5)).verdict == K.PASS
    subj = subject("diverge-stuck")
    assert K.check_stuck_soundness(subj, range(5)).verdict == K.PASS
    assert K.check_stuck_preservation(subj, range(3)).verdict == K.PASS


def test_premises_not_met_are_inconclusive():
    assert K.check_stuck_soundness(subject("millionaires"), range(3)).verdict == K.INCONCLUSIVE
    assert K.check_terminal_correspondence(subject("stuck-assign"), range(3)).verdict == K.INCONCLUSIVE
    assert K.check_confluence(subject("millionaires"), []).verdict == K.INCONCLUSIVE


def test_divergence_surrogate():
    p = compile_source("principal A B\ndef loop n = loop (n + 1)\ndef main () = par {A,B} loop 0")
    subj = K.Subject("loop", p.expr, p.principals)
    assert K.check_divergence(subj, range(3), 500).verdict == K.PASS


def test_st_determinism_on_corpus():
    for e in corpus_list():
        p = e.compile()
        subj = K.Subject(e.name, p.expr, p.principals, e.manifest.oracle(), e.manifest.fuel)
        assert K.check_st_determinism(subj).verdict == K.PASS


def test_report_line_format():
    r = K.CheckReport("confluence", "millionaires", K.PASS, 20)
    assert r.line().split() == ["confluence", "millionaires", "20", "PASS"]


def test_zero_seeds_is_inconclusive_everywhere():
    subs = report.corpus_subjects(corpus_list())[:3] + report.generated_subjects(2)
    reps = report.run_suite(subs, 0, diamond=False)
    assert reps and all(r.verdict == K.INCONCLUSIVE for r in reps)


def test_summary_is_key_value():
    reps = report.run_suite(report.corpus_subjects([entry("millionaires")]), 2)
    text = report.summary(reps)
    lines = text.splitlines()
    assert lines[:4] == [f"checks={len(reps)}", f"pass={len(reps)}", "fail=0", "inconclusive=0"]
    assert all("=" in l for l in lines)
    assert "confluence.millionaires=PASS" in lines


def _broken_local_step(orig):
    # a plausible bug: the skipped-par binding leaks a concrete 0 instead of the opaque value
    def step(z, io=S.NO_INPUT, backend=None):
        r = orig(z, io, backend)
        if type(r) is D.LStepped and r.rule == "DS-PAREMPTY":
            x = r.config.expr.name
            r.config.env = {**r.config.env, x: IntV(0)}
        return r
    return step


def test_broken_evaluator_is_caught(monkeypatch):
    monkeypatch.setattr(D, "local_step", _broken_local_step(D.local_step))
    subs = report.corpus_subjects([entry("par-scoping"), entry("delegation")])
    reps = report.run_suite(subs, 3, diamond=False)
    assert report.failed(reps)
    bad = [r for r in reps if r.verdict == K.FAIL]
    assert all(r.counterexample is not None for r in bad)


def test_failures_are_replayable(monkeypatch):
    monkeypatch.setattr(D, "local_step", _broken_local_step(D.local_step))
    r = K.check_terminal_correspondence(subject("par-scoping"), range(3))
    assert r.verdict == K.FAIL
    seed = r.counterexample["seed"]
    again = K.check_terminal_correspondence(subject("par-scoping"), [seed])
    assert again.verdict == K.FAIL and again.detail == r.detail


def test_generated_population_passes():
    subs = report.generated_subjects(25, seed=7)
    reps = report.run_suite(subs, 4)
    assert not report.failed(reps), [r.line() for r in reps if r.verdict == K.FAIL]
