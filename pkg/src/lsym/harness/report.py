"""Run every check over a population of programs and summarize the verdicts."""
from __future__ import annotations

from collections import Counter
from typing import Callable, Iterable, Optional

from .. import st_eval as st
from .checks import (FAIL, INCONCLUSIVE, PASS, CheckReport, Subject, check_confluence,
                     check_diamond, check_divergence, check_st_determinism,
                     check_stuck_preservation, check_stuck_soundness,
                     check_terminal_correspondence)
from .generator import generate_many


def corpus_subjects(entries, fuel: Optional[int] = None) -> list[Subject]:
    out = []
    for e in entries:
        p = e.compile()
        out.append(Subject(e.name, p.expr, p.principals, e.manifest.oracle(),
                           fuel or e.manifest.fuel))
    return out


def generated_subjects(n: int, seed: int = 0, stuck: bool = False, fuel: int = 5000,
                       **kw) -> list[Subject]:
    tag = "stuck" if stuck else "gen"
    return [Subject(f"{tag}-{g.seed}", g.expr, g.principals, g.io, fuel)
            for g in generate_many(n, seed, stuck=stuck, **kw)]


def check_subject(subj: Subject, seeds: int, diamond: bool = True,
                  max_parties: int = 6, extra: int = 1000) -> list[CheckReport]:
    """The checks whose premises match the single-threaded outcome of ``subj``."""
    if seeds <= 0:
        return [CheckReport(c, subj.name, INCONCLUSIVE, 0, "no seeds")
                for c in ("st-determinism", "terminal-correspondence", "confluence")]
    seed_list = range(seeds)
    out = [check_st_determinism(subj)]
    r = st.run_expr(subj.expr, subj.principals, subj.io, subj.fuel)
    if type(r) is st.Terminal:
        out.append(check_terminal_correspondence(subj, seed_list))
        out.append(check_confluence(subj, seed_list))
    elif type(r) is st.StuckState:
        out.append(check_stuck_soundness(subj, seed_list))
        out.append(check_stuck_preservation(subj, seed_list[:3], extra))
    else:
        out.append(check_divergence(subj, seed_list[:3], min(subj.fuel, 2000)))
    if diamond:
        out.append(_diamond(subj, max_parties))
    return out


def _diamond(subj: Subject, max_parties: int) -> CheckReport:
    return check_diamond(subj, depth=6, max_states=20_000, max_parties=max_parties)


def run_suite(subjects: Iterable[Subject], seeds: int, diamond: bool = True,
              emit: Optional[Callable[[str], None]] = None) -> list[CheckReport]:
    reports = []
    for subj in subjects:
        for rep in check_subject(subj, seeds, diamond):
            reports.append(rep)
            if emit is not None:
                emit(rep.line())
    return reports


def summary(reports: list[CheckReport]) -> str:
    """Stable ``key=value`` lines for CI gating."""
    counts = Counter(r.verdict for r in reports)
    lines = [f"checks={len(reports)}", f"pass={counts[PASS]}", f"fail={counts[FAIL]}",
             f"inconclusive={counts[INCONCLUSIVE]}"]
    lines += [f"{r.check}.{r.program}={r.verdict}" for r in reports]
    return "\n".join(lines) + "\n"


def failed(reports) -> bool:
    return any(r.verdict == FAIL for r in reports)
