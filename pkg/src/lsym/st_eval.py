"""Single-threaded semantics: the atomic judgment and the step relation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import kernels
from .syntax import core as C
from .syntax.pretty import head_text, pset_text
from .values import (CLEAR, STAR, CloV, Enc, Frame, InjV, IntV, Located, PairV, PSetV, RefV,
                     STConfig, compatible, initial_st, located_span_ok, relocate, relocate_env,
                     show)


@dataclass(frozen=True)
class InputOracle:
    """Per-party input queues; ``read`` past the end is a stuck state."""
    queues: dict = field(default_factory=dict)

    def get(self, party: str, cursor: int) -> Optional[int]:
        q = self.queues.get(party, ())
        return q[cursor] if cursor < len(q) else None

    @classmethod
    def of(cls, **queues) -> "InputOracle":
        return cls({a: tuple(q) for a, q in queues.items()})


NO_INPUT = InputOracle()


class Stuck(Exception):
    def __init__(self, rule: str, reason: str):
        super().__init__(f"{rule}: {reason}")
        self.rule = rule
        self.reason = reason


# step results

@dataclass
class Stepped:
    config: STConfig
    rule: str
    value: object = None  # the atom's value when the step popped a frame


@dataclass
class Terminal:
    value: object
    store: dict
    config: STConfig
    rule: str = ""
    steps: int = 0
    outputs: dict = field(default_factory=dict)   # writes including the final atom's


@dataclass
class StuckState:
    config: STConfig
    rule: str
    reason: str
    steps: int = 0

    @property
    def diagnostic(self) -> str:
        return f"{self.rule}: {self.reason}"


@dataclass
class OutOfFuel:
    config: STConfig
    steps: int = 0


# atomic judgment

class _Effects:
    """Mutable scratch state for one atomic evaluation; copied on write."""
    __slots__ = ("store", "owned", "next_loc", "cursors", "outputs", "io")

    def __init__(self, store, next_loc, cursors, outputs, io):
        self.store = store
        self.owned = False
        self.next_loc = next_loc
        self.cursors = cursors
        self.outputs = outputs
        self.io = io

    def write(self, loc, cell):
        if not self.owned:
            self.store = dict(self.store)
            self.owned = True
        self.store[loc] = cell


def prot_text(psi) -> str:
    return "clear" if psi is CLEAR else str(psi)


def _lookup(env, x, m):
    try:
        v = env[x]
    except KeyError:
        raise Stuck("ST-VAR", f"unbound variable {x}") from None
    return relocate(v, m)


def _at(v, m, rule, what):
    if v is STAR:
        raise Stuck(rule, f"{what} is opaque (*)")
    if v.at != m:
        raise Stuck(rule, f"expected {what} at {pset_text(m)}, found {pset_text(v.at)}")
    return v.u


def _int(v, m, rule, what):
    u = _at(v, m, rule, what)
    if type(u) is not IntV:
        raise Stuck(rule, f"{what} is not an integer: {show(v)}")
    return u


def _pset(v, m, rule, what):
    u = _at(v, m, rule, what)
    if type(u) is not PSetV:
        raise Stuck(rule, f"{what} is not a party set: {show(v)}")
    return u.parties


def _single(m, rule):
    if len(m) != 1:
        raise Stuck(rule, f"I/O needs a single-party mode, found {pset_text(m)}")
    return next(iter(m))


def _a_var(env, m, a, fx):
    return "ST-VAR", _lookup(env, a.name, m)


def _a_lit(env, m, a, fx):
    return "ST-LIT", Located(IntV(a.value), m)


def _a_pset(env, m, a, fx):
    return "ST-LIT", Located(PSetV(a.parties), m)


def _a_binop(env, m, a, fx):
    if a.op == "union":
        p1 = _pset(_lookup(env, a.left, m), m, "ST-PSET-BINOP", a.left)
        p2 = _pset(_lookup(env, a.right, m), m, "ST-PSET-BINOP", a.right)
        return "ST-PSET-BINOP", Located(PSetV(p1 | p2), m)
    rule = "ST-INT-BINOP"
    u1 = _int(_lookup(env, a.left, m), m, rule, a.left)
    u2 = _int(_lookup(env, a.right, m), m, rule, a.right)
    if u1.prot != u2.prot:
        raise Stuck(rule, f"protocol mismatch: {prot_text(u1.prot)} vs {prot_text(u2.prot)}")
    if not compatible(u1.prot, m):
        raise Stuck(rule, f"{u1.prot} is not compatible with mode {pset_text(m)}")
    return rule, Located(IntV(kernels.apply_op(a.op, u1.i, u2.i), u1.prot), m)


def _a_mux(env, m, a, fx):
    rule = "ST-MUX"
    us = [_int(_lookup(env, x, m), m, rule, x) for x in (a.cond, a.then, a.other)]
    psi = us[0].prot
    if any(u.prot != psi for u in us):
        raise Stuck(rule, "protocol mismatch among mux operands")
    if not compatible(psi, m):
        raise Stuck(rule, f"{psi} is not compatible with mode {pset_text(m)}")
    return rule, Located(IntV(kernels.cond(us[0].i, us[1].i, us[2].i), psi), m)


def _a_pair(env, m, a, fx):
    return "ST-PAIR", Located(PairV(_lookup(env, a.left, m), _lookup(env, a.right, m)), m)


def _a_proj(env, m, a, fx):
    u = _at(_lookup(env, a.arg, m), m, "ST-PROJ", a.arg)
    if type(u) is not PairV:
        raise Stuck("ST-PROJ", f"{a.arg} is not a pair")
    return "ST-PROJ", u.left if a.index == 1 else u.right


def _a_inj(env, m, a, fx):
    return "ST-INJ", Located(InjV(a.index, _lookup(env, a.arg, m)), m)


def _a_fun(env, m, a, fx):
    return "ST-FUN", Located(CloV(a, relocate_env(env, m)), m)


def _a_ref(env, m, a, fx):
    v = _lookup(env, a.arg, m)
    loc = fx.next_loc
    fx.next_loc += 1
    fx.write(loc, (m, v))
    return "ST-REF", Located(RefV(loc, m), m)


def _a_deref(env, m, a, fx):
    u = _at(_lookup(env, a.arg, m), m, "ST-DEREF", a.arg)
    if type(u) is not RefV:
        raise Stuck("ST-DEREF", f"{a.arg} is not a reference")
    cell = fx.store.get(u.loc)
    if cell is None:
        raise Stuck("ST-DEREF", f"dangling reference loc{u.loc}")
    return "ST-DEREF", relocate(cell[1], m)


def _a_assign(env, m, a, fx):
    u = _at(_lookup(env, a.target, m), m, "ST-ASSIGN", a.target)
    if type(u) is not RefV:
        raise Stuck("ST-ASSIGN", f"{a.target} is not a reference")
    if u.creators != m:
        raise Stuck("ST-ASSIGN", f"reference creators {pset_text(u.creators)} "
                                 f"do not match mode {pset_text(m)}")
    v = _lookup(env, a.value, m)
    fx.write(u.loc, (u.creators, v))
    return "ST-ASSIGN", v


def _a_read(env, m, a, fx):
    party = _single(m, "ST-READ")
    c = fx.cursors.get(party, 0)
    i = fx.io.get(party, c)
    if i is None:
        raise Stuck("ST-READ", f"input queue of {party} is exhausted")
    fx.cursors = {**fx.cursors, party: c + 1}
    return "ST-READ", Located(IntV(kernels.wrap(i)), m)


def _a_write(env, m, a, fx):
    party = _single(m, "ST-WRITE")
    u = _int(_lookup(env, a.arg, m), m, "ST-WRITE", a.arg)
    if u.prot is not CLEAR:
        raise Stuck("ST-WRITE", "cannot write an encrypted value")
    fx.outputs = {**fx.outputs, party: tuple(fx.outputs.get(party, ())) + (u.i,)}
    return "ST-WRITE", Located(IntV(0), m)


def _sync_sets(env, m, a, rule):
    p = _pset(_lookup(env, a.sender, m), m, rule, a.sender)
    q = _pset(_lookup(env, a.receiver, m), m, rule, a.receiver)
    if not q:
        raise Stuck(rule, "receiving party set is empty")
    if not p:
        raise Stuck(rule, "sending party set is empty")
    if m != p | q:
        raise Stuck(rule, f"mode {pset_text(m)} differs from {pset_text(p)} \\/ {pset_text(q)}")
    return p, q


def _a_share(env, m, a, fx):
    rule = "ST-SHARE"
    p, q = _sync_sets(env, m, a, rule)
    u = _int(_lookup(env, a.arg, p), p, rule, a.arg)
    if not compatible(u.prot, p):
        raise Stuck(rule, f"{u.prot} is not compatible with senders {pset_text(p)}")
    return rule, Located(IntV(u.i, Enc(q)), q)


def _a_reveal(env, m, a, fx):
    rule = "ST-REVEAL"
    p, q = _sync_sets(env, m, a, rule)
    u = _int(_lookup(env, a.arg, p), p, rule, a.arg)
    if u.prot != Enc(p):
        raise Stuck(rule, f"expected a share among {pset_text(p)}, found {show(Located(u, p))}")
    return rule, Located(IntV(u.i), q)


def _a_tosum(env, m, a, fx):
    u = _int(_lookup(env, a.arg, m), m, "ST-TOSUM", a.arg)
    if u.prot is not CLEAR:
        raise Stuck("ST-TOSUM", "cannot branch on encrypted value")
    return "ST-TOSUM", Located(InjV(2 if u.i else 1, Located(IntV(0), m)), m)


ATOM_RULES: dict[type, Callable] = {
    C.Var: _a_var, C.Lit: _a_lit, C.PSetLit: _a_pset, C.BinOp: _a_binop, C.Mux: _a_mux,
    C.Pair: _a_pair, C.Proj: _a_proj, C.Inj: _a_inj, C.Fun: _a_fun, C.Ref: _a_ref,
    C.Deref: _a_deref, C.Assign: _a_assign, C.Read: _a_read, C.Write: _a_write,
    C.Share: _a_share, C.Reveal: _a_reveal, C.ToSum: _a_tosum,
}


def st_atomic(env: dict, m: frozenset, store: dict, a, io: InputOracle = NO_INPUT):
    """``γ ⊢_m δ, a ↪ δ', v``. Raises ``Stuck`` when a premise fails."""
    fx = _Effects(store, max(store, default=-1) + 1, {}, {}, io)
    _rule, v = ATOM_RULES[type(a)](env, m, a, fx)
    return fx.store, v


# step relation

def _fresh(z: STConfig) -> str:
    return f"%{z.next_fresh}"


def st_step(z: STConfig, io: InputOracle = NO_INPUT):
    """One transition of the single-threaded machine."""
    e, m, env = z.expr, z.mode, z.env
    t = type(e)
    try:
        if t is C.Let:
            frame = Frame(e.name, e.body, m, env)
            return Stepped(STConfig(m, env, z.store, (frame, z.stack), e.bound, z.next_loc,
                                    z.next_fresh, z.cursors, z.outputs), "ST-LETPUSH")
        if t is C.Par:
            p = _pset(_lookup(env, e.parties, m), m, "ST-PAR", e.parties)
            inter = m & p
            if inter:
                return Stepped(STConfig(inter, env, z.store, z.stack, e.body, z.next_loc,
                                        z.next_fresh, z.cursors, z.outputs), "ST-PAR")
            x = _fresh(z)
            env2 = dict(env)
            env2[x] = STAR
            return Stepped(STConfig(m, env2, z.store, z.stack, C.Var(x), z.next_loc,
                                    z.next_fresh + 1, z.cursors, z.outputs), "ST-PAREMPTY")
        if t is C.App:
            v1 = _lookup(env, e.fn, m)
            u = _at(v1, m, "ST-APP", e.fn)
            if type(u) is not CloV:
                raise Stuck("ST-APP", f"{e.fn} is not a function: {show(v1)}")
            env2 = dict(u.env)
            env2[u.fun.self_name] = v1
            env2[u.fun.param] = _lookup(env, e.arg, m)
            return Stepped(STConfig(m, env2, z.store, z.stack, u.fun.body, z.next_loc,
                                    z.next_fresh, z.cursors, z.outputs), "ST-APP")
        if t is C.CaseSum:
            u = _at(_lookup(env, e.subject, m), m, "ST-CASE-INJ", e.subject)
            if type(u) is not InjV:
                raise Stuck("ST-CASE-INJ", f"{e.subject} is not an injection")
            env2 = dict(env)
            if u.index == 1:
                env2[e.left_binder] = u.payload
                body = e.left
            else:
                env2[e.right_binder] = u.payload
                body = e.right
            return Stepped(STConfig(m, env2, z.store, z.stack, body, z.next_loc,
                                    z.next_fresh, z.cursors, z.outputs), "ST-CASE-INJ")
        if t is C.CasePSet:
            p = _pset(_lookup(env, e.subject, m), m, "ST-CASE-PSET", e.subject)
            if not p:
                return Stepped(STConfig(m, env, z.store, z.stack, e.empty, z.next_loc,
                                        z.next_fresh, z.cursors, z.outputs), "ST-CASE-PSET-EMP")
            b = min(p)
            env2 = dict(env)
            env2[e.elem_binder] = Located(PSetV(frozenset((b,))), m)
            env2[e.rest_binder] = Located(PSetV(p - {b}), m)
            return Stepped(STConfig(m, env2, z.store, z.stack, e.nonempty, z.next_loc,
                                    z.next_fresh, z.cursors, z.outputs), "ST-CASE-PSET-CONS")
        fx = _Effects(z.store, z.next_loc, z.cursors, z.outputs, io)
        rule, v = ATOM_RULES[t](env, m, e, fx)
    except Stuck as s:
        return StuckState(z, s.rule, s.reason)
    if not z.stack:
        return Terminal(v, fx.store, z, rule, outputs=fx.outputs)
    frame, rest = z.stack
    env2 = dict(frame.env)
    env2[frame.binder] = v
    return Stepped(STConfig(frame.mode, env2, fx.store, rest, frame.body, fx.next_loc,
                            z.next_fresh, fx.cursors, fx.outputs), f"ST-LETPOP({rule})", v)


class InvariantViolation(AssertionError):
    pass


def _check(before: STConfig, r) -> None:
    """Atom results fit the mode they were computed in; pops restore the saved frame."""
    v = r.value
    if v is not None and not located_span_ok(v, before.mode):
        raise InvariantViolation(f"{show(v)} escapes mode {pset_text(before.mode)}")
    if type(r) is Stepped and r.rule.startswith("ST-LETPOP"):
        frame = before.stack[0]
        after = r.config
        if after.mode != frame.mode or after.stack is not before.stack[1]:
            raise InvariantViolation("frame pop did not restore the saved mode")
        if any(after.env[x] is not w for x, w in frame.env.items() if x != frame.binder):
            raise InvariantViolation("frame pop did not restore the saved environment")


def trace_line(n: int, rule: str, z: STConfig) -> str:
    return f"{n:>6}  {rule:<28}{pset_text(z.mode):<14}{head_text(z.expr)}"


def st_run(z: STConfig, io: InputOracle = NO_INPUT, fuel: int = 100_000,
           trace: Optional[Callable[[str], None]] = None, check: bool = False):
    """Iterate ``st_step`` until terminal, stuck, or the fuel is spent."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    steps = 0
    while True:
        r = st_step(z, io)
        if check and type(r) is not StuckState:
            _check(z, r)
        if type(r) is Stepped:
            if trace is not None:
                trace(trace_line(steps + 1, r.rule, z))
            steps += 1
            z = r.config
            if steps >= fuel:
                return OutOfFuel(z, steps)
            continue
        r.steps = steps
        if trace is not None:
            label = r.rule if type(r) is Terminal else f"STUCK {r.rule}"
            trace(trace_line(steps + 1, label, z))
        return r


def run_expr(expr, principals, io: InputOracle = NO_INPUT, fuel: int = 100_000, trace=None,
             check: bool = False):
    return st_run(initial_st(principals, expr), io, fuel, trace, check)
