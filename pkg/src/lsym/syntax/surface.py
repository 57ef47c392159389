"""Surface syntax tree produced by the parser; sugar is kept until lowering."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

Pos = tuple  # (line, col)


@dataclass
class SNode:
    pos: Pos = field(default=(0, 0), compare=False, kw_only=True)


# patterns used by let, fun parameters and case branches

@dataclass
class PName(SNode):
    name: str  # "_" is the wildcard


@dataclass
class PTuple(SNode):
    items: list


@dataclass
class PUnit(SNode):
    pass


# expressions

@dataclass
class SVar(SNode):
    name: str


@dataclass
class SInt(SNode):
    value: int


@dataclass
class SPSet(SNode):
    members: list  # names: principals or variables holding sets


@dataclass
class SBinOp(SNode):
    op: str  # surface spelling, e.g. "+", "<=", "\\/"
    left: SNode
    right: SNode


@dataclass
class SApp(SNode):
    fn: SNode
    arg: SNode


@dataclass
class SFun(SNode):
    self_name: Optional[str]
    params: list
    body: SNode


@dataclass
class SLet(SNode):
    pat: SNode
    bound: SNode
    body: SNode
    rec: bool = False


@dataclass
class SIf(SNode):
    cond: SNode
    then: SNode
    other: SNode


@dataclass
class SMux(SNode):
    cond: SNode
    then: SNode
    other: SNode


@dataclass
class SPar(SNode):
    parties: SNode
    body: SNode


@dataclass
class SCaseSum(SNode):
    subject: SNode
    left_pat: SNode
    left: SNode
    right_pat: SNode
    right: SNode


@dataclass
class SCaseList(SNode):
    subject: SNode
    nil: SNode
    head: SNode
    tail: SNode
    cons: SNode


@dataclass
class SCasePSet(SNode):
    subject: SNode
    empty: SNode
    elem: str
    rest: str
    nonempty: SNode


@dataclass
class SShare(SNode):
    sender: SNode
    receiver: SNode
    arg: SNode
    annotation: str = ""


@dataclass
class SReveal(SNode):
    sender: SNode
    receiver: SNode
    arg: SNode
    annotation: str = ""


@dataclass
class SUnary(SNode):
    op: str  # ref, deref, write, inj1, inj2, proj1, proj2, tosum
    arg: SNode


@dataclass
class SAssign(SNode):
    target: SNode
    value: SNode


@dataclass
class SRead(SNode):
    pass


@dataclass
class STuple(SNode):
    items: list


@dataclass
class SList(SNode):
    items: list


@dataclass
class SCons(SNode):
    head: SNode
    tail: SNode


@dataclass
class SUnit(SNode):
    pass


@dataclass
class Def(SNode):
    name: str
    params: list
    body: SNode
    brec: bool = False


@dataclass
class Program:
    principals: list
    defs: list
    main: Optional[SNode] = None
