"""Lexer and recursive-descent parser for the surface language."""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import surface as S

KEYWORDS = {
    "principal", "party", "def", "brec", "let", "rec", "in", "fun", "if", "then",
    "else", "mux", "par", "case", "share", "reveal", "read", "write", "ref", "inj1",
    "inj2", "inl", "inr", "proj1", "proj2", "fst", "snd", "true", "false", "tosum",
}

SYMBOLS = [
    "\\/", "->", ":=", "::", "==", "<=", ">=", "&&", "||",
    "(", ")", "{", "}", "[", "]", ",", ";", "=", "<", ">", "+", "-", "*", "%", "^", "!", ":",
]

PREFIX_OPS = {
    "ref": "ref", "write": "write", "inj1": "inj1", "inl": "inj1", "inj2": "inj2",
    "inr": "inj2", "proj1": "proj1", "fst": "proj1", "proj2": "proj2", "snd": "proj2",
    "tosum": "tosum",
}
OPEN_FORMS = {"let", "fun", "if", "mux", "par", "case", "share", "reveal"}
CMP_OPS = {"==", "<", "<=", ">", ">="}

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>--[^\n]*)"
    r"|(?P<int>[0-9]+n?)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<string>\"[^\"\n]*\")"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + r")"
)


@dataclass(frozen=True)
class Token:
    kind: str  # INT IDENT KW SYM STRING EOF
    value: object
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "EOF":
            return "end of input"
        return repr(str(self.value))


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(set(expected)))
        detail = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{line}:{col}: {message}{detail}")


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        val = m.group()
        col = i - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            toks.append(Token("INT", int(val.rstrip("n")), line, col))
        elif kind == "ident":
            toks.append(Token("KW" if val in KEYWORDS else "IDENT", val, line, col))
        elif kind == "string":
            toks.append(Token("STRING", val[1:-1], line, col))
        elif kind == "sym":
            toks.append(Token("SYM", val, line, col))
        i = m.end()
    toks.append(Token("EOF", None, line, i - line_start + 1))
    return toks


PRIMARY_START = ["integer", "identifier", "'('", "'{'", "'['", "'true'", "'false'", "'read'"] + \
    [f"'{k}'" for k in sorted(OPEN_FORMS)]
EXPR_START = PRIMARY_START + ["'!'", "'-'"] + [f"'{k}'" for k in sorted(PREFIX_OPS)]


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.no_brace = [False]

    # token helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, kind: str, value=None, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == kind and (value is None or t.value == value)

    def at_sym(self, value: str) -> bool:
        return self.at("SYM", value)

    def at_kw(self, value: str) -> bool:
        return self.at("KW", value)

    def advance(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def fail(self, expected, message: str | None = None):
        t = self.peek()
        raise ParseError(message or f"unexpected {t.describe()}", t.line, t.col, expected)

    def expect_sym(self, value: str) -> Token:
        if not self.at_sym(value):
            self.fail([f"'{value}'"])
        return self.advance()

    def expect_kw(self, value: str) -> Token:
        if not self.at_kw(value):
            self.fail([f"'{value}'"])
        return self.advance()

    def expect_ident(self) -> Token:
        if not self.at("IDENT"):
            self.fail(["identifier"])
        return self.advance()

    def pos(self) -> tuple:
        t = self.peek()
        return (t.line, t.col)

    # declarations

    def program(self) -> S.Program:
        prog = S.Program(principals=[], defs=[])
        saw_decl = False
        while not self.at("EOF"):
            if self.at_kw("principal") or self.at_kw("party"):
                self.advance()
                if not self.at("IDENT"):
                    self.fail(["identifier"])
                while self.at("IDENT"):
                    prog.principals.append(self.advance().value)
                saw_decl = True
            elif self.at_kw("def"):
                prog.defs.append(self.definition())
                saw_decl = True
            elif not saw_decl:
                prog.main = self.expr()
                if not self.at("EOF"):
                    self.fail(["end of input"])
            else:
                self.fail(["'def'", "'principal'", "'party'", "end of input"])
        for d in prog.defs:
            if d.name == "main":
                prog.main = d.body if not d.params or _unit_params(d.params) else None
                if prog.main is None:
                    raise ParseError("main takes no parameters", d.pos[0], d.pos[1])
        return prog

    def definition(self) -> S.Def:
        start = self.pos()
        self.expect_kw("def")
        brec = False
        if self.at_kw("brec"):
            self.advance()
            brec = True
        name = self.expect_ident().value
        params = []
        while not self.at_sym("="):
            params.append(self.param())
        self.expect_sym("=")
        body = self.expr()
        return S.Def(name=name, params=params, body=body, brec=brec, pos=start)

    def param(self):
        start = self.pos()
        if self.at("IDENT"):
            return S.PName(self.advance().value, pos=start)
        if self.at_sym("("):
            self.advance()
            if self.at_sym(")"):
                self.advance()
                return S.PUnit(pos=start)
            items = [self.param()]
            while self.at_sym(","):
                self.advance()
                items.append(self.param())
            self.expect_sym(")")
            return items[0] if len(items) == 1 else S.PTuple(items, pos=start)
        self.fail(["identifier", "'('", "'='"])

    # expressions

    def expr(self):
        t = self.peek()
        if t.kind == "KW" and t.value in OPEN_FORMS:
            return self.open_form()
        return self.assign()

    def open_form(self):
        start = self.pos()
        kw = self.peek().value
        if kw == "let":
            return self.let_form()
        if kw == "fun":
            self.advance()
            self_name = None
            if self.at_sym("["):
                self.advance()
                self_name = self.expect_ident().value
                self.expect_sym("]")
            params = [self.param()]
            while not self.at_sym("->"):
                params.append(self.param())
            self.expect_sym("->")
            return S.SFun(self_name, params, self.expr(), pos=start)
        if kw == "if":
            self.advance()
            c = self.expr()
            self.expect_kw("then")
            a = self.expr()
            self.expect_kw("else")
            return S.SIf(c, a, self.expr(), pos=start)
        if kw == "mux":
            self.advance()
            self.expect_kw("if")
            c = self.expr()
            self.expect_kw("then")
            a = self.expr()
            self.expect_kw("else")
            return S.SMux(c, a, self.expr(), pos=start)
        if kw == "par":
            self.advance()
            ps = self.primary()
            return S.SPar(ps, self.expr(), pos=start)
        if kw == "case":
            return self.case_form()
        if kw in ("share", "reveal"):
            return self.sync_form()
        self.fail(EXPR_START)

    def let_form(self):
        start = self.pos()
        self.expect_kw("let")
        rec = False
        if self.at_kw("rec"):
            self.advance()
            rec = True
        pat = self.param()
        params = []
        while not self.at_sym("="):
            params.append(self.param())
        self.expect_sym("=")
        bound = self.expr()
        self.expect_kw("in")
        body = self.expr()
        if params:
            if not isinstance(pat, S.PName):
                raise ParseError("function binding needs a name", start[0], start[1])
            bound = S.SFun(pat.name if rec else None, params, bound, pos=start)
            rec = False
        elif rec:
            if not (isinstance(pat, S.PName) and isinstance(bound, S.SFun)):
                raise ParseError("let rec binds a fun", start[0], start[1])
            bound = S.SFun(pat.name, bound.params, bound.body, pos=bound.pos)
        return S.SLet(pat, bound, body, rec=rec, pos=start)

    def case_form(self):
        start = self.pos()
        self.expect_kw("case")
        self.no_brace.append(True)
        subject = self.expr()
        self.no_brace.pop()
        self.expect_sym("{")
        if self.at_sym(";"):
            self.advance()
        if self.at_sym("{"):
            self.advance()
            self.expect_sym("}")
            self.expect_sym("->")
            empty = self.expr()
            self.expect_sym(";")
            self.expect_sym("{")
            elem = self.binder()
            self.expect_sym("}")
            self.expect_sym("\\/")
            rest = self.binder()
            self.expect_sym("->")
            nonempty = self.expr()
            self.expect_sym("}")
            return S.SCasePSet(subject, empty, elem, rest, nonempty, pos=start)
        if self.at_sym("["):
            self.advance()
            self.expect_sym("]")
            self.expect_sym("->")
            nil = self.expr()
            self.expect_sym(";")
            head = self.param()
            self.expect_sym("::")
            tail = self.param()
            self.expect_sym("->")
            cons = self.expr()
            self.expect_sym("}")
            return S.SCaseList(subject, nil, head, tail, cons, pos=start)
        if self.at_kw("inl") or self.at_kw("inj1"):
            self.advance()
            lp = self.param()
            self.expect_sym("->")
            left = self.expr()
            self.expect_sym(";")
            if not (self.at_kw("inr") or self.at_kw("inj2")):
                self.fail(["'inr'", "'inj2'"])
            self.advance()
            rp = self.param()
            self.expect_sym("->")
            right = self.expr()
            self.expect_sym("}")
            return S.SCaseSum(subject, lp, left, rp, right, pos=start)
        self.fail(["'{'", "'['", "'inl'", "'inj1'"])

    def binder(self) -> str:
        return self.expect_ident().value

    def sync_form(self):
        start = self.pos()
        kw = self.advance().value
        self.expect_sym("[")
        annotation = self.skip_annotation()
        self.no_brace.append(False)
        sender = self.expr()
        self.expect_sym("->")
        receiver = self.expr()
        self.no_brace.pop()
        self.expect_sym("]")
        arg = self.expr()
        cls = S.SShare if kw == "share" else S.SReveal
        return cls(sender, receiver, arg, annotation=annotation, pos=start)

    def skip_annotation(self) -> str:
        """Protocol/type annotations like `gmw, int :` are inert; drop them."""
        depth, k = 0, 0
        while True:
            t = self.peek(k)
            if t.kind == "EOF":
                return ""
            if t.kind == "SYM":
                if t.value in ("(", "[", "{"):
                    depth += 1
                elif t.value in (")", "]", "}"):
                    if depth == 0:
                        return ""
                    depth -= 1
                elif t.value == "->" and depth == 0:
                    return ""
                elif t.value == ":" and depth == 0:
                    words = [str(self.peek(j).value) for j in range(k)]
                    self.i += k + 1
                    return " ".join(words)
            k += 1

    def assign(self):
        start = self.pos()
        lhs = self.cons()
        if self.at_sym(":="):
            self.advance()
            return S.SAssign(lhs, self.expr(), pos=start)
        return lhs

    def cons(self):
        start = self.pos()
        h = self.binary(0)
        if self.at_sym("::"):
            self.advance()
            t = self.expr() if self._at_open_form() else self.cons()
            return S.SCons(h, t, pos=start)
        return h

    LEVELS = [{"||"}, {"&&"}, CMP_OPS, {"\\/"}, {"+", "-", "^"}, {"*", "%"}]

    def binary(self, level: int):
        if level == len(self.LEVELS):
            return self.unary()
        start = self.pos()
        left = self.binary(level + 1)
        ops = self.LEVELS[level]
        while self.peek().kind == "SYM" and self.peek().value in ops:
            op = self.advance().value
            right = self.expr() if self._at_open_form() else self.binary(level + 1)
            left = S.SBinOp(op, left, right, pos=start)
            if ops is CMP_OPS:
                break
        return left

    def _at_open_form(self) -> bool:
        t = self.peek()
        return t.kind == "KW" and t.value in OPEN_FORMS

    def unary(self):
        start = self.pos()
        t = self.peek()
        if t.kind == "SYM" and t.value == "!":
            self.advance()
            return S.SUnary("deref", self.unary(), pos=start)
        if t.kind == "SYM" and t.value == "-":
            self.advance()
            if self.at("INT"):
                return S.SInt(-self.advance().value, pos=start)
            return S.SBinOp("-", S.SInt(0, pos=start), self.unary(), pos=start)
        if t.kind == "KW" and t.value in PREFIX_OPS:
            self.advance()
            return S.SUnary(PREFIX_OPS[t.value], self.unary(), pos=start)
        return self.application()

    def starts_primary(self) -> bool:
        t = self.peek()
        if t.kind in ("INT", "IDENT"):
            return True
        if t.kind == "SYM":
            if t.value == "{":
                return not self.no_brace[-1]
            return t.value in ("(", "[")
        if t.kind == "KW":
            return t.value in ("true", "false", "read") or t.value in OPEN_FORMS
        return False

    def application(self):
        start = self.pos()
        if not self.starts_primary() and not self.at_sym("{"):
            self.fail(EXPR_START, f"expected an expression, found {self.peek().describe()}")
        fn = self.primary()
        while self.starts_primary():
            if self._at_open_form():
                return S.SApp(fn, self.open_form(), pos=start)
            fn = S.SApp(fn, self.primary(), pos=start)
        return fn

    def primary(self):
        start = self.pos()
        t = self.peek()
        if t.kind == "INT":
            self.advance()
            return S.SInt(t.value, pos=start)
        if t.kind == "IDENT":
            self.advance()
            return S.SVar(t.value, pos=start)
        if t.kind == "KW":
            if t.value in ("true", "false"):
                self.advance()
                return S.SInt(1 if t.value == "true" else 0, pos=start)
            if t.value == "read":
                self.advance()
                self.skip_read_annotation()
                return S.SRead(pos=start)
            if t.value in OPEN_FORMS:
                return self.open_form()
        if t.kind == "SYM":
            if t.value == "(":
                self.advance()
                if self.at_sym(")"):
                    self.advance()
                    return S.SUnit(pos=start)
                self.no_brace.append(False)
                items = [self.expr()]
                while self.at_sym(","):
                    self.advance()
                    items.append(self.expr())
                self.no_brace.pop()
                self.expect_sym(")")
                return items[0] if len(items) == 1 else S.STuple(items, pos=start)
            if t.value == "{":
                self.advance()
                members = []
                if not self.at_sym("}"):
                    members.append(self.expect_ident().value)
                    while self.at_sym(","):
                        self.advance()
                        members.append(self.expect_ident().value)
                self.expect_sym("}")
                return S.SPSet(members, pos=start)
            if t.value == "[":
                self.advance()
                items = []
                self.no_brace.append(False)
                if not self.at_sym("]"):
                    items.append(self.expr())
                    while self.at_sym(","):
                        self.advance()
                        items.append(self.expr())
                self.no_brace.pop()
                self.expect_sym("]")
                return S.SList(items, pos=start)
        self.fail(EXPR_START, f"expected an expression, found {t.describe()}")

    def skip_read_annotation(self):
        # `read int from "file"`, `read (array int) from "file"`, `read nat`
        if self.at("IDENT") and self.peek().value in ("int", "nat", "bool"):
            self.advance()
        elif self.at_sym("(") and self.at("IDENT", "array", 1):
            while not self.at_sym(")"):
                self.advance()
            self.advance()
        else:
            return
        if self.at("IDENT", "from") and self.at("STRING", k=1):
            self.advance()
            self.advance()


def _unit_params(params) -> bool:
    return all(isinstance(p, S.PUnit) for p in params)


def parse(text: str) -> S.Program:
    """Parse surface source into a Program (sugar intact, positions kept)."""
    return Parser(text).program()


def parse_expr(text: str):
    p = Parser(text)
    e = p.expr()
    if not p.at("EOF"):
        p.fail(["end of input"])
    return e
