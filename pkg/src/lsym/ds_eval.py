"""Distributed semantics: per-party local steps, share/reveal synchronization,
schedulers, and outcome classification.

Each party owns a ``LocalConfig``. A party whose next expression is a share or
reveal parks with its own view of the synchronization; the group fires once every
member of the mode is parked with the same view. A ``Simulation`` holds the
distributed configuration and the per-party status cache; ``ds_run`` drives it with
a scheduler.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernels
from .st_eval import NO_INPUT, InputOracle, Stuck, prot_text
from .syntax import core as C
from .syntax.pretty import pset_text
from .values import (CLEAR, STAR, CloV, Enc, Frame, InjV, IntV, LocalConfig, PairV, PSetV,
                     RefV, ShareV, canonicalize, compatible, show)

INT_TYPES = (IntV, ShareV)


# local step results

@dataclass
class LStepped:
    config: LocalConfig
    rule: str


@dataclass
class NeedsSync:
    kind: str              # "share" or "reveal"
    view: tuple            # (kind, expr, mode, p, q): must match across the group
    payload: object        # the provider's integer value, or None outside p
    counter: int = 0       # syncs and par-skips so far; schedule-independent

    @property
    def mode(self) -> frozenset:
        return self.view[2]


@dataclass
class LocalTerminal:
    value: object
    store: dict
    config: LocalConfig
    rule: str
    outputs: tuple = ()


@dataclass
class LocalStuck:
    config: LocalConfig
    rule: str
    reason: str

    @property
    def diagnostic(self) -> str:
        return f"{self.rule}: {self.reason}"


# local atomic judgment

class _LocalFx:
    __slots__ = ("party", "store", "owned", "next_loc", "cursor", "outputs", "io", "backend")

    def __init__(self, z: LocalConfig, io, backend):
        self.party = z.party
        self.store = z.store
        self.owned = False
        self.next_loc = z.next_loc
        self.cursor = z.cursor
        self.outputs = z.outputs
        self.io = io
        self.backend = backend

    def write(self, loc, v):
        if not self.owned:
            self.store = dict(self.store)
            self.owned = True
        self.store[loc] = v


def _get(env, x, rule):
    try:
        return env[x]
    except KeyError:
        raise Stuck(rule, f"unbound variable {x}") from None


def _concrete(v, rule, what):
    if v is STAR:
        raise Stuck(rule, f"{what} is opaque (*)")
    return v


def _int(env, x, rule):
    v = _concrete(_get(env, x, rule), rule, x)
    if type(v) not in INT_TYPES:
        raise Stuck(rule, f"{x} is not an integer: {show(v)}")
    return v


def _pset(env, x, rule):
    v = _concrete(_get(env, x, rule), rule, x)
    if type(v) is not PSetV:
        raise Stuck(rule, f"{x} is not a party set: {show(v)}")
    return v.parties


def _same_prot(us, m, rule):
    psi = us[0].prot
    if any(u.prot != psi for u in us[1:]):
        raise Stuck(rule, "protocol mismatch: " + " vs ".join(prot_text(u.prot) for u in us))
    if not compatible(psi, m):
        raise Stuck(rule, f"{psi} is not compatible with mode {pset_text(m)}")
    return psi


def _combine(op, us, m, fx, rule):
    """Integer operation; shares in concrete mode go through the backend."""
    psi = _same_prot(us, m, rule)
    if type(us[0]) is ShareV:
        if any(type(u) is not ShareV for u in us):
            raise Stuck(rule, "mixed abstract and concrete shares")
        h, w = fx.backend.binop(op, tuple(u.handle for u in us), tuple(u.word for u in us),
                                us[0].owners, fx.party)
        return ShareV(h, w, us[0].owners)
    if op == "mux":
        return IntV(kernels.cond(us[0].i, us[1].i, us[2].i), psi)
    return IntV(kernels.apply_op(op, us[0].i, us[1].i), psi)


def _d_var(env, m, a, fx):
    return "DS-VAR", _get(env, a.name, "DS-VAR")


def _d_lit(env, m, a, fx):
    return "DS-LIT", IntV(a.value)


def _d_pset(env, m, a, fx):
    return "DS-LIT", PSetV(a.parties)


def _d_binop(env, m, a, fx):
    if a.op == "union":
        rule = "DS-PSET-BINOP"
        return rule, PSetV(_pset(env, a.left, rule) | _pset(env, a.right, rule))
    rule = "DS-INT-BINOP"
    return rule, _combine(a.op, [_int(env, a.left, rule), _int(env, a.right, rule)], m, fx, rule)


def _d_mux(env, m, a, fx):
    rule = "DS-MUX"
    return rule, _combine("mux", [_int(env, x, rule) for x in (a.cond, a.then, a.other)],
                          m, fx, rule)


def _d_pair(env, m, a, fx):
    return "DS-PAIR", PairV(_get(env, a.left, "DS-PAIR"), _get(env, a.right, "DS-PAIR"))


def _d_proj(env, m, a, fx):
    v = _concrete(_get(env, a.arg, "DS-PROJ"), "DS-PROJ", a.arg)
    if type(v) is not PairV:
        raise Stuck("DS-PROJ", f"{a.arg} is not a pair")
    return "DS-PROJ", v.left if a.index == 1 else v.right


def _d_inj(env, m, a, fx):
    return "DS-INJ", InjV(a.index, _get(env, a.arg, "DS-INJ"))


def _d_fun(env, m, a, fx):
    return "DS-FUN", CloV(a, env)


def _d_ref(env, m, a, fx):
    v = _get(env, a.arg, "DS-REF")
    loc = fx.next_loc
    fx.next_loc += 1
    fx.write(loc, v)
    return "DS-REF", RefV(loc, m)


def _ref(env, x, rule):
    v = _concrete(_get(env, x, rule), rule, x)
    if type(v) is not RefV:
        raise Stuck(rule, f"{x} is not a reference")
    return v


def _d_deref(env, m, a, fx):
    r = _ref(env, a.arg, "DS-DEREF")
    if r.loc not in fx.store:
        raise Stuck("DS-DEREF", f"dangling reference loc{r.loc}")
    return "DS-DEREF", fx.store[r.loc]


def _d_assign(env, m, a, fx):
    r = _ref(env, a.target, "DS-ASSIGN")
    if r.creators != m:
        raise Stuck("DS-ASSIGN", f"reference creators {pset_text(r.creators)} "
                                 f"do not match mode {pset_text(m)}")
    v = _get(env, a.value, "DS-ASSIGN")
    fx.write(r.loc, v)
    return "DS-ASSIGN", v


def _single(m, rule):
    if len(m) != 1:
        raise Stuck(rule, f"I/O needs a single-party mode, found {pset_text(m)}")


def _d_read(env, m, a, fx):
    _single(m, "DS-READ")
    i = fx.io.get(fx.party, fx.cursor)
    if i is None:
        raise Stuck("DS-READ", f"input queue of {fx.party} is exhausted")
    fx.cursor += 1
    return "DS-READ", IntV(kernels.wrap(i))


def _d_write(env, m, a, fx):
    _single(m, "DS-WRITE")
    u = _int(env, a.arg, "DS-WRITE")
    if u.prot != CLEAR:
        raise Stuck("DS-WRITE", "cannot write an encrypted value")
    fx.outputs = fx.outputs + (u.i,)
    return "DS-WRITE", IntV(0)


def _d_tosum(env, m, a, fx):
    u = _int(env, a.arg, "DS-TOSUM")
    if u.prot != CLEAR:
        raise Stuck("DS-TOSUM", "cannot branch on encrypted value")
    return "DS-TOSUM", InjV(2 if u.i else 1, IntV(0))


LOCAL_RULES: dict[type, Callable] = {
    C.Var: _d_var, C.Lit: _d_lit, C.PSetLit: _d_pset, C.BinOp: _d_binop, C.Mux: _d_mux,
    C.Pair: _d_pair, C.Proj: _d_proj, C.Inj: _d_inj, C.Fun: _d_fun, C.Ref: _d_ref,
    C.Deref: _d_deref, C.Assign: _d_assign, C.Read: _d_read, C.Write: _d_write,
    C.ToSum: _d_tosum,
}


def ds_atomic(env: dict, m: frozenset, store: dict, a, io: InputOracle = NO_INPUT,
              party: str = "", backend=None):
    """``γ̇ ⊢_m δ̇, a ↪ δ̇', v̇`` for non-synchronizing atoms. Raises ``Stuck``."""
    if isinstance(a, C.SYNC_TYPES):
        raise ValueError("share and reveal synchronize; use local_step")
    z = LocalConfig(party, m, env, store, (), a, max(store, default=-1) + 1)
    fx = _LocalFx(z, io, backend)
    _rule, v = LOCAL_RULES[type(a)](env, m, a, fx)
    return fx.store, v


def _sync_view(z: LocalConfig):
    """Own-view premises of share/reveal; failures are local."""
    e, m, env = z.expr, z.mode, z.env
    kind = "share" if type(e) is C.Share else "reveal"
    rule = "DS-SHARE" if kind == "share" else "DS-REVEAL"
    p = _pset(env, e.sender, rule)
    q = _pset(env, e.receiver, rule)
    if not q:
        raise Stuck(rule, "receiving party set is empty")
    if not p:
        raise Stuck(rule, "sending party set is empty")
    if m != p | q:
        raise Stuck(rule, f"mode {pset_text(m)} differs from {pset_text(p)} \\/ {pset_text(q)}")
    payload = None
    if z.party in p:
        payload = _int(env, e.arg, rule)
        if kind == "share" and not compatible(payload.prot, p):
            raise Stuck(rule, f"{payload.prot} is not compatible with senders {pset_text(p)}")
        if kind == "reveal" and payload.prot != Enc(p):
            raise Stuck(rule, f"expected a share among {pset_text(p)}, found {show(payload)}")
    return NeedsSync(kind, (kind, e, m, p, q), payload)


def _fresh(z: LocalConfig) -> str:
    return f"%{z.next_fresh}"


def _with(z: LocalConfig, **kw) -> LocalConfig:
    c = LocalConfig(z.party, z.mode, z.env, z.store, z.stack, z.expr, z.next_loc,
                    z.next_fresh, z.cursor, z.outputs)
    for k, v in kw.items():
        setattr(c, k, v)
    return c


def local_step(z: LocalConfig, io: InputOracle = NO_INPUT, backend=None):
    """``ζ̇ ⟶_A ζ̇'`` for party ``z.party``, or why it cannot take one."""
    e, m, env = z.expr, z.mode, z.env
    t = type(e)
    try:
        if t is C.Let:
            return LStepped(_with(z, stack=(Frame(e.name, e.body, m, env), z.stack),
                                  expr=e.bound), "DS-LETPUSH")
        if t is C.Par:
            p = _pset(env, e.parties, "DS-PAR")
            if z.party in p:
                return LStepped(_with(z, mode=m & p, expr=e.body), "DS-PAR")
            x = _fresh(z)
            env2 = dict(env)
            env2[x] = STAR
            return LStepped(_with(z, env=env2, expr=C.Var(x), next_fresh=z.next_fresh + 1),
                            "DS-PAREMPTY")
        if t is C.App:
            f = _concrete(_get(env, e.fn, "DS-APP"), "DS-APP", e.fn)
            if type(f) is not CloV:
                raise Stuck("DS-APP", f"{e.fn} is not a function: {show(f)}")
            env2 = dict(f.env)
            env2[f.fun.self_name] = f
            env2[f.fun.param] = _get(env, e.arg, "DS-APP")
            return LStepped(_with(z, env=env2, expr=f.fun.body), "DS-APP")
        if t is C.CaseSum:
            v = _concrete(_get(env, e.subject, "DS-CASE-INJ"), "DS-CASE-INJ", e.subject)
            if type(v) is not InjV:
                raise Stuck("DS-CASE-INJ", f"{e.subject} is not an injection")
            env2 = dict(env)
            if v.index == 1:
                env2[e.left_binder] = v.payload
                body = e.left
            else:
                env2[e.right_binder] = v.payload
                body = e.right
            return LStepped(_with(z, env=env2, expr=body), "DS-CASE-INJ")
        if t is C.CasePSet:
            p = _pset(env, e.subject, "DS-CASE-PSET")
            if not p:
                return LStepped(_with(z, expr=e.empty), "DS-CASE-PSET-EMP")
            b = min(p)
            env2 = dict(env)
            env2[e.elem_binder] = PSetV(frozenset((b,)))
            env2[e.rest_binder] = PSetV(p - {b})
            return LStepped(_with(z, env=env2, expr=e.nonempty), "DS-CASE-PSET-CONS")
        if t is C.Share or t is C.Reveal:
            return _sync_view(z)
        fx = _LocalFx(z, io, backend)
        rule, v = LOCAL_RULES[t](env, m, e, fx)
    except Stuck as s:
        return LocalStuck(z, s.rule, s.reason)
    if not z.stack:
        return LocalTerminal(v, fx.store, z, rule, fx.outputs)
    frame, rest = z.stack
    env2 = dict(frame.env)
    env2[frame.binder] = v
    return LStepped(LocalConfig(z.party, frame.mode, env2, fx.store, rest, frame.body,
                                fx.next_loc, z.next_fresh, fx.cursor, fx.outputs),
                    f"DS-LETPOP({rule})")


# distributed configurations

def initial_ds(principals, expr) -> dict:
    m = frozenset(principals)
    return {a: LocalConfig(a, m, {}, {}, (), expr) for a in sorted(m)}


def canonical_dist(configs: dict) -> tuple:
    return tuple((a, canonicalize(configs[a])) for a in sorted(configs))


class SyncError(Exception):
    pass


def _payload_key(v):
    if type(v) is ShareV:
        return ("h", v.handle)
    return ("i", v.i, v.prot)


def sync_outcome(parked: dict, backend=None) -> dict:
    """Values each member of a ready group receives. ``parked`` maps party -> NeedsSync."""
    first = next(iter(parked.values()))
    kind, _e, m, p, q = first.view
    providers = [parked[a].payload for a in sorted(p)]
    src = providers[0]
    if backend is None:
        if kind == "share":
            got = IntV(src.i, Enc(q))
        else:
            got = IntV(src.i)
        return {a: (got if a in q else STAR) for a in sorted(m)}
    if type(src) is ShareV:
        value = backend.open({a: parked[a].payload.word for a in p}, src.owners)
    else:
        value = src.i
    if kind == "reveal":
        return {a: (IntV(value) if a in q else STAR) for a in sorted(m)}
    source = _payload_key(src)
    counters = tuple(sorted((a, parked[a].counter) for a in m))
    bundle = backend.share(p, q, value, source, counters)
    return {a: (ShareV(bundle.handle, bundle.share_of(a), q) if a in q else STAR)
            for a in sorted(m)}


# outcomes

@dataclass
class DsOutcome:
    configs: dict
    steps: int
    sim: "Simulation" = field(repr=False)

    @property
    def reveals(self) -> list:
        return self.sim.revealed_values()


@dataclass
class Terminal(DsOutcome):
    values: dict = field(default_factory=dict)     # party -> final local value
    stores: dict = field(default_factory=dict)     # party -> final local store
    outputs: dict = field(default_factory=dict)    # party -> written integers


@dataclass
class LocallyStuck(DsOutcome):
    witness: str = ""
    diagnostic: str = ""
    stuck: dict = field(default_factory=dict)      # party -> diagnostic


@dataclass
class OutOfFuel(DsOutcome):
    pass


@dataclass
class Deadlock(DsOutcome):
    blocked: dict = field(default_factory=dict)    # party -> sync view it waits on


@dataclass
class Starved(DsOutcome):
    party: str = ""


# schedulers

class Scheduler:
    def start(self, parties: list) -> None:
        pass

    def choose(self, actors: list):
        raise NotImplementedError


class RoundRobin(Scheduler):
    """Cycles through parties; a ready sync group acts when any member's turn comes."""

    def start(self, parties):
        self.order = list(parties)
        self.pos = 0

    def choose(self, actors):
        owner = {}
        for act in actors:
            for a in ((act,) if type(act) is str else sorted(act)):
                owner.setdefault(a, act)
        n = len(self.order)
        for k in range(n):
            a = self.order[(self.pos + k) % n]
            if a in owner:
                self.pos = (self.pos + k + 1) % n
                return owner[a]
        return None


class SeededRandom(Scheduler):
    """Uniform among enabled actors; reproducible from the seed."""

    def __init__(self, seed: int):
        self.seed = seed

    def start(self, parties):
        self.rng = random.Random(self.seed)

    def choose(self, actors):
        return self.rng.choice(actors)


class Scripted(Scheduler):
    """Follows a list of party names, then falls back to round robin."""

    def __init__(self, sequence):
        self.sequence = list(sequence)

    def start(self, parties):
        self.idx = 0
        self.fallback = RoundRobin()
        self.fallback.start(parties)
        self.wanted = None

    def choose(self, actors):
        if self.idx >= len(self.sequence):
            return self.fallback.choose(actors)
        a = self.sequence[self.idx]
        self.idx += 1
        for act in actors:
            if act == a or (type(act) is not str and a in act):
                return act
        self.wanted = a
        return None


@dataclass
class Exhaustive(Scheduler):
    """Marker for breadth-first exploration of every interleaving (see ``explore``)."""
    bound: int = 6

    def choose(self, actors):
        raise TypeError("exhaustive scheduling explores all actors; use explore()")


def parse_schedule(text: str) -> list:
    """Party names separated by commas or whitespace; ``#`` starts a comment."""
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines())
    return body.replace(",", " ").split()


# the simulation loop

class Simulation:
    """Mutable driver over an immutable-per-step distributed configuration."""

    def __init__(self, configs: dict, io: InputOracle = NO_INPUT, backend=None):
        self.configs = dict(configs)
        self.parties = sorted(configs)
        self.io = io
        self.backend = backend
        self.status: dict = {}
        self.forced: dict = {}     # party -> LocalStuck from disagreeing sync views
        self.steps = 0
        self.reveal_log: list = []
        self.rule_log: dict = {a: [] for a in self.parties}
        for a in self.parties:
            self._refresh(a)

    def copy(self) -> "Simulation":
        s = Simulation.__new__(Simulation)
        s.configs = dict(self.configs)
        s.parties = self.parties
        s.io = self.io
        s.backend = self.backend
        s.status = dict(self.status)
        s.forced = dict(self.forced)
        s.steps = self.steps
        s.reveal_log = list(self.reveal_log)
        s.rule_log = {a: list(r) for a, r in self.rule_log.items()}
        return s

    def _refresh(self, a):
        r = local_step(self.configs[a], self.io, self.backend)
        if type(r) is NeedsSync:
            r.counter = self.configs[a].next_fresh
        self.status[a] = r

    def stuck(self) -> dict:
        out = {a: r for a, r in self.status.items() if type(r) is LocalStuck}
        out.update(self.forced)
        return out

    def _group_state(self, m: frozenset):
        """'ready', 'conflict' or 'blocked' for the group whose mode is ``m``."""
        members = []
        for a in m:
            r = self.status.get(a)
            if type(r) is not NeedsSync or a in self.forced:
                return "blocked"
            members.append(r)
        if any(r.mode != m for r in members):
            return "blocked"
        v0 = members[0].view
        if any(r.view != v0 for r in members):
            return "conflict"
        keys = {_payload_key(r.payload) for r in members if r.payload is not None}
        if len(keys) > 1:
            return "conflict"
        return "ready"

    def actors(self) -> list:
        acts = [a for a in self.parties if type(self.status[a]) is LStepped]
        groups = set()
        for a in self.parties:
            r = self.status[a]
            if type(r) is NeedsSync and a not in self.forced and r.mode not in groups:
                st = self._group_state(r.mode)
                if st == "ready":
                    groups.add(r.mode)
                elif st == "conflict":
                    for b in r.mode:
                        self.forced[b] = LocalStuck(self.configs[b], "DS-" + r.kind.upper(),
                                                    "sync views disagree")
        return acts + sorted(groups, key=lambda g: tuple(sorted(g)))

    def fire(self, actor) -> tuple:
        """Apply one actor's step; returns (label, rule, mode before the step)."""
        self.steps += 1
        if type(actor) is str:
            r = self.status[actor]
            mode = self.configs[actor].mode
            self.configs[actor] = r.config
            self.rule_log[actor].append(r.rule)
            self._refresh(actor)
            return actor, r.rule, mode
        parked = {a: self.status[a] for a in actor}
        kind = next(iter(parked.values())).kind
        rule = "DS-SHARE" if kind == "share" else "DS-REVEAL"
        got = sync_outcome(parked, self.backend)
        if kind == "reveal":
            key = tuple(sorted((a, parked[a].counter) for a in actor))
            value = next(v.i for v in got.values() if v is not STAR)
            self.reveal_log.append((key, value))
        for a in actor:
            z = self.configs[a]
            x = _fresh(z)
            env2 = dict(z.env)
            env2[x] = got[a]
            self.configs[a] = _with(z, env=env2, expr=C.Var(x), next_fresh=z.next_fresh + 1)
            self.rule_log[a].append(rule)
            self._refresh(a)
        return "SYNC" + pset_text(actor), rule, actor

    def revealed_values(self) -> list:
        """Revealed integers in an order that does not depend on the schedule."""
        return [v for _k, v in sorted(self.reveal_log)]

    def quiescent_outcome(self) -> DsOutcome:
        stuck = self.stuck()
        if stuck:
            return self._stuck_outcome(stuck)
        if all(type(r) is LocalTerminal for r in self.status.values()):
            return Terminal(self.configs, self.steps, self,
                            {a: r.value for a, r in self.status.items()},
                            {a: r.store for a, r in self.status.items()},
                            {a: r.outputs for a, r in self.status.items()})
        blocked = {a: r.view for a, r in self.status.items() if type(r) is NeedsSync}
        return Deadlock(self.configs, self.steps, self, blocked)

    def _stuck_outcome(self, stuck: dict) -> LocallyStuck:
        w = min(stuck)
        return LocallyStuck(self.configs, self.steps, self, w, stuck[w].diagnostic,
                            {a: r.diagnostic for a, r in stuck.items()})

    def canonical(self) -> tuple:
        return canonical_dist(self.configs)


def trace_line(n: int, label: str, rule: str, mode: frozenset) -> str:
    return f"{n:>6}  {label:<16}{rule:<28}{pset_text(mode)}"


def ds_run(configs: dict, scheduler: Optional[Scheduler] = None, io: InputOracle = NO_INPUT,
           fuel: int = 100_000, trace: Optional[Callable[[str], None]] = None,
           stop_on_stuck: bool = True, backend=None) -> DsOutcome:
    """Run until every party is terminal, some party is stuck, or the fuel is spent."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    sched = scheduler or RoundRobin()
    if isinstance(sched, Exhaustive):
        raise TypeError("exhaustive scheduling explores all actors; use explore()")
    sim = Simulation(configs, io, backend)
    sched.start(sim.parties)
    return drive(sim, sched, fuel, trace, stop_on_stuck)


def drive(sim: Simulation, sched: Scheduler, fuel: int, trace=None,
          stop_on_stuck: bool = True) -> DsOutcome:
    used = 0
    while True:
        acts = sim.actors()
        if stop_on_stuck:
            stuck = sim.stuck()
            if stuck:
                return sim._stuck_outcome(stuck)
        if not acts:
            return sim.quiescent_outcome()
        if used >= fuel:
            return OutOfFuel(sim.configs, sim.steps, sim)
        act = sched.choose(acts)
        if act is None:
            return Starved(sim.configs, sim.steps, sim, getattr(sched, "wanted", None) or "")
        label, rule, mode = sim.fire(act)
        used += 1
        if trace is not None:
            trace(trace_line(sim.steps, label, rule, mode))


def run_expr(expr, principals, scheduler=None, io: InputOracle = NO_INPUT,
             fuel: int = 100_000, trace=None, stop_on_stuck: bool = True, backend=None):
    return ds_run(initial_ds(principals, expr), scheduler, io, fuel, trace, stop_on_stuck,
                  backend)


# exhaustive exploration

class BoundExceeded(Exception):
    pass


def _check_small(configs: dict, max_parties: int, max_size: int):
    if len(configs) > max_parties:
        raise BoundExceeded(f"{len(configs)} parties exceed the bound {max_parties}")
    for z in configs.values():
        if C.size(z.expr) > max_size:
            raise BoundExceeded("term too large for exhaustive exploration")


def successors(sim: Simulation) -> dict:
    """Canonical key -> simulation after one step, for each enabled actor."""
    out = {}
    for act in sim.actors():
        s = sim.copy()
        s.fire(act)
        out.setdefault(s.canonical(), s)
    return out


def enumerate_successors(configs: dict, io: InputOracle = NO_INPUT, backend=None,
                         max_parties: int = 4, max_size: int = 2000) -> dict:
    """All one-step successors of a distributed configuration, deduplicated."""
    _check_small(configs, max_parties, max_size)
    return {k: s.configs for k, s in successors(Simulation(configs, io, backend)).items()}


@dataclass
class Exploration:
    nodes: dict            # key -> Simulation
    edges: dict            # key -> set of successor keys
    depth: dict            # key -> BFS depth
    complete: bool         # False when max_states cut the search short


def explore(configs: dict, io: InputOracle = NO_INPUT, depth: int = 6,
            max_states: int = 20_000, max_parties: int = 3, max_size: int = 2000) -> Exploration:
    """Breadth-first search of reachable configurations up to ``depth`` steps."""
    _check_small(configs, max_parties, max_size)
    root = Simulation(configs, io)
    k0 = root.canonical()
    nodes, edges, dist = {k0: root}, {}, {k0: 0}
    todo = deque([k0])
    complete = True
    while todo:
        k = todo.popleft()
        if dist[k] >= depth:
            continue
        succ = successors(nodes[k])
        edges[k] = set(succ)
        for k2, s in succ.items():
            if k2 not in nodes:
                if len(nodes) >= max_states:
                    complete = False
                    continue
                nodes[k2] = s
                dist[k2] = dist[k] + 1
                todo.append(k2)
    return Exploration(nodes, edges, dist, complete)
