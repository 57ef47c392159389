from . import core
from .core import alpha_eq, free_vars
from .lower import CoreProgram, LowerError, compile_program, compile_source, lower, prelude_names
from .parser import ParseError, parse, parse_expr
from .pretty import pretty, pretty_program

__all__ = [
    "CoreProgram", "LowerError", "ParseError", "alpha_eq", "compile_program", "compile_source",
    "core", "free_vars", "lower", "parse", "parse_expr", "prelude_names", "pretty",
    "pretty_program",
]
