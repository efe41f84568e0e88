"""SimScript: the small sandboxed language generated simulations run in.

Sources use the ``.sims`` extension and usually begin with the
``## simscript v1`` sentinel comment. Grammar and builtin reference:
docs/simscript.md.
"""

from .builtins_table import BUILTINS, OUTPUT_BUILTINS, RANDOM_BUILTINS
from .checker import StaticIssue, StaticReport, static_check
from .interpreter import (
    DivisionByZero,
    ExecError,
    ExecLimits,
    RunResult,
    RuntimeTypeError,
    SeriesBudgetExceeded,
    StepBudgetExceeded,
    interpret,
)
from .lexer import IllegalCharacter, IndentationMismatch, LexError, Token, lex
from .nodes import Program
from .parser import ParseError, UnexpectedToken, UnterminatedBlock, parse, parse_source, to_source

__all__ = [
    "BUILTINS",
    "OUTPUT_BUILTINS",
    "RANDOM_BUILTINS",
    "DivisionByZero",
    "ExecError",
    "ExecLimits",
    "IllegalCharacter",
    "IndentationMismatch",
    "LexError",
    "ParseError",
    "Program",
    "RunResult",
    "RuntimeTypeError",
    "SeriesBudgetExceeded",
    "StaticIssue",
    "StaticReport",
    "StepBudgetExceeded",
    "Token",
    "UnexpectedToken",
    "UnterminatedBlock",
    "interpret",
    "lex",
    "parse",
    "parse_source",
    "static_check",
    "to_source",
]
