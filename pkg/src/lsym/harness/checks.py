"""Executable checks relating the single-threaded and distributed semantics.

Each check treats the evaluators as black boxes and returns a ``CheckReport``.
Failing reports carry enough to replay: the subject, the seed and both canonical
forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import ds_eval as ds
from .. import st_eval as st
from ..values import canonical_terminal, slice_local, slice_value

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"

CHECKS = ("terminal-correspondence", "stuck-soundness", "st-determinism", "confluence",
          "diamond", "stuck-preservation", "divergence")


@dataclass
class Subject:
    name: str
    expr: object
    principals: tuple
    io: st.InputOracle = st.NO_INPUT
    fuel: int = 100_000


@dataclass
class CheckReport:
    check: str
    program: str
    verdict: str
    seeds: int = 0
    detail: str = ""
    counterexample: Optional[dict] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.verdict != FAIL

    def line(self) -> str:
        return f"{self.check:<24}{self.program:<28}{self.seeds:<6}{self.verdict}"


def _report(check, subj, verdict, seeds, detail="", cex=None):
    return CheckReport(check, subj.name, verdict, seeds, detail, cex)


# terminal views

def st_terminal_views(r: st.Terminal) -> dict:
    """Each party's slice of a single-threaded terminal state, canonicalized."""
    z = r.config
    out = {}
    for a in sorted(z.mode):
        store = {loc: slice_value(v, a) for loc, (cr, v) in r.store.items() if a in cr}
        out[a] = canonical_terminal(slice_local(z, a), store, slice_value(r.value, a))
    return out


def ds_terminal_views(r: ds.Terminal) -> dict:
    return {a: canonical_terminal(r.configs[a], r.stores[a], r.values[a]) for a in r.configs}


def end_state(r: ds.DsOutcome) -> tuple:
    """Canonical form of a halted distributed run."""
    if type(r) is ds.Terminal:
        return ("terminal", tuple(sorted(ds_terminal_views(r).items())))
    return (type(r).__name__, ds.canonical_dist(r.configs))


def run_st(subj: Subject, trace=None):
    return st.run_expr(subj.expr, subj.principals, subj.io, subj.fuel, trace)


def run_ds(subj: Subject, seed: int, stop_on_stuck: bool = True, backend=None, fuel=None):
    return ds.run_expr(subj.expr, subj.principals, ds.SeededRandom(seed), subj.io,
                       fuel or subj.fuel, stop_on_stuck=stop_on_stuck, backend=backend)


def compare_terminal(st_views: dict, r: ds.Terminal) -> Optional[str]:
    """None when the distributed terminal state matches the sliced single-threaded one."""
    dv = ds_terminal_views(r)
    for a, view in st_views.items():
        if dv.get(a) != view:
            return f"party {a} differs"
    return None


# the checks

def check_terminal_correspondence(subj: Subject, seeds) -> CheckReport:
    """A terminating single-threaded run and every distributed run end in the same views."""
    name = "terminal-correspondence"
    seeds = list(seeds)
    r = run_st(subj)
    if type(r) is not st.Terminal:
        return _report(name, subj, INCONCLUSIVE, len(seeds), f"single-threaded run: {type(r).__name__}")
    if not seeds:
        return _report(name, subj, INCONCLUSIVE, 0, "no schedules tried")
    views = st_terminal_views(r)
    short = 0
    for seed in seeds:
        d = run_ds(subj, seed)
        if type(d) is ds.OutOfFuel:
            short += 1
            continue
        if type(d) is not ds.Terminal:
            detail = getattr(d, "diagnostic", type(d).__name__)
            return _report(name, subj, FAIL, len(seeds), f"seed {seed}: {detail}",
                           {"seed": seed, "st": views, "ds": end_state(d)})
        why = compare_terminal(views, d)
        if why:
            return _report(name, subj, FAIL, len(seeds), f"seed {seed}: {why}",
                           {"seed": seed, "st": views, "ds": ds_terminal_views(d)})
    if short == len(seeds):
        return _report(name, subj, INCONCLUSIVE, len(seeds), "every schedule ran out of fuel")
    return _report(name, subj, PASS, len(seeds))


def check_stuck_soundness(subj: Subject, seeds) -> CheckReport:
    """A stuck single-threaded run means every fair distributed run gets locally stuck."""
    name = "stuck-soundness"
    seeds = list(seeds)
    r = run_st(subj)
    if type(r) is not st.StuckState:
        return _report(name, subj, INCONCLUSIVE, len(seeds), f"single-threaded run: {type(r).__name__}")
    if not seeds:
        return _report(name, subj, INCONCLUSIVE, 0, "no schedules tried")
    short = 0
    for seed in seeds:
        d = run_ds(subj, seed)
        if type(d) is ds.OutOfFuel:
            short += 1
        elif type(d) is not ds.LocallyStuck:
            return _report(name, subj, FAIL, len(seeds), f"seed {seed}: {type(d).__name__}",
                           {"seed": seed, "st": r.diagnostic, "ds": end_state(d)})
    if short:
        return _report(name, subj, INCONCLUSIVE, len(seeds), f"{short} schedules ran out of fuel")
    return _report(name, subj, PASS, len(seeds), r.diagnostic)


def check_st_determinism(subj: Subject, runs: int = 2) -> CheckReport:
    """Repeated single-threaded runs give identical traces and outcomes."""
    name = "st-determinism"
    seen = None
    for _ in range(runs):
        lines: list = []
        r = run_st(subj, lines.append)
        key = ("\n".join(lines), type(r).__name__, getattr(r, "steps", None))
        if seen is not None and key != seen:
            return _report(name, subj, FAIL, runs, "traces differ", {"a": seen, "b": key})
        seen = key
    return _report(name, subj, PASS, runs)


def check_confluence(subj: Subject, seeds) -> CheckReport:
    """All halting distributed runs agree on their canonical end state."""
    name = "confluence"
    seeds = list(seeds)
    if not seeds:
        return _report(name, subj, INCONCLUSIVE, 0, "no schedules tried")
    states: dict = {}
    short = 0
    for seed in seeds:
        d = run_ds(subj, seed, stop_on_stuck=False)
        if type(d) is ds.OutOfFuel:
            short += 1
            continue
        states.setdefault(end_state(d), seed)
        if len(states) > 1:
            a, b = list(states.items())[:2]
            return _report(name, subj, FAIL, len(seeds), f"seeds {a[1]} and {b[1]} disagree",
                           {"seeds": (a[1], b[1]), "a": a[0], "b": b[0]})
    if not states:
        return _report(name, subj, INCONCLUSIVE, len(seeds), "no schedule halted")
    return _report(name, subj, PASS, len(seeds), f"{short} schedules out of fuel" if short else "")


def check_diamond(subj: Subject, depth: int = 6, max_states: int = 20_000,
                  max_parties: int = 3) -> CheckReport:
    """Distinct one-step successors of every reachable state share a successor."""
    name = "diamond"
    try:
        ex = ds.explore(ds.initial_ds(subj.principals, subj.expr), subj.io, depth, max_states,
                        max_parties)
    except ds.BoundExceeded as e:
        return _report(name, subj, INCONCLUSIVE, 0, str(e))
    succ_cache: dict = {}

    def succ(k):
        if k not in succ_cache:
            succ_cache[k] = ex.edges[k] if k in ex.edges else set(ds.successors(ex.nodes[k]))
        return succ_cache[k]

    pairs = 0
    for k, outs in ex.edges.items():
        outs = sorted(outs, key=repr)
        for i, k1 in enumerate(outs):
            for k2 in outs[i + 1:]:
                pairs += 1
                if not succ(k1) & succ(k2):
                    return _report(name, subj, FAIL, 0, "successor pair does not rejoin",
                                   {"from": k, "left": k1, "right": k2})
    detail = f"{len(ex.nodes)} states, {pairs} pairs"
    if not ex.complete:
        detail += ", state bound reached"
    return _report(name, subj, PASS, 0, detail)


def check_stuck_preservation(subj: Subject, seeds, extra: int = 1000) -> CheckReport:
    """Once locally stuck, a party stays stuck however long the others run."""
    name = "stuck-preservation"
    seeds = list(seeds)
    tried = 0
    for seed in seeds:
        d = run_ds(subj, seed)
        if type(d) is not ds.LocallyStuck:
            continue
        tried += 1
        sim, w = d.sim, d.witness
        frozen = sim.configs[w]
        sched = ds.SeededRandom(seed + 1)
        sched.start(sim.parties)
        for _ in range(extra):
            acts = sim.actors()
            if w not in sim.stuck() or sim.configs[w] is not frozen:
                return _report(name, subj, FAIL, len(seeds), f"seed {seed}: {w} recovered",
                               {"seed": seed, "witness": w})
            if not acts:
                break
            sim.fire(sched.choose(acts))
    if not tried:
        return _report(name, subj, INCONCLUSIVE, len(seeds), "no run got stuck")
    return _report(name, subj, PASS, len(seeds))


def check_divergence(subj: Subject, seeds, fuel: int) -> CheckReport:
    """Fuel-level surrogate: if the single-threaded run outlasts ``fuel`` steps, so does
    every fair distributed run."""
    name = "divergence"
    seeds = list(seeds)
    r = st.run_expr(subj.expr, subj.principals, subj.io, fuel)
    if type(r) is not st.OutOfFuel:
        return _report(name, subj, INCONCLUSIVE, len(seeds), f"single-threaded run: {type(r).__name__}")
    for seed in seeds:
        d = run_ds(subj, seed, fuel=fuel)
        if type(d) is not ds.OutOfFuel:
            return _report(name, subj, FAIL, len(seeds), f"seed {seed}: {type(d).__name__}",
                           {"seed": seed})
    return _report(name, subj, PASS, len(seeds))
