"""SimScript AST.

Node equality ignores source spans so that printer round-trips
(``parse(to_source(parse(p))) == parse(p)``) compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Span = tuple[int, int]  # 1-based line, column


def _span_field() -> Span:
    return (0, 0)


@dataclass(frozen=True)
class Node:
    span: Span = field(default_factory=_span_field, compare=False, repr=False, kw_only=True)


# --- expressions ---


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Str(Node):
    value: str


@dataclass(frozen=True)
class Bool(Node):
    value: bool


@dataclass(frozen=True)
class Name(Node):
    ident: str


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple["Expr", ...] = ()


@dataclass(frozen=True)
class Index(Node):
    base: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str  # '-'
    operand: "Expr"


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # + - * / == != < <= > >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple["Expr", ...]


Expr = Num | Str | Bool | Name | ListLit | Index | UnaryOp | BinOp | Call


# --- statements ---


@dataclass(frozen=True)
class Assign(Node):
    target: str
    value: Expr


@dataclass(frozen=True)
class Append(Node):
    target: str
    value: Expr


@dataclass(frozen=True)
class ExprStmt(Node):
    expr: Call


@dataclass(frozen=True)
class Pass(Node):
    pass


@dataclass(frozen=True)
class If(Node):
    cond: Expr
    body: tuple["Stmt", ...]
    orelse: tuple["Stmt", ...] = ()


@dataclass(frozen=True)
class While(Node):
    cond: Expr
    body: tuple["Stmt", ...]


@dataclass(frozen=True)
class ForRange(Node):
    var: str
    start: Expr | None  # None means range(stop) starting at 0
    stop: Expr
    body: tuple["Stmt", ...]


Stmt = Assign | Append | ExprStmt | Pass | If | While | ForRange


@dataclass(frozen=True)
class Program(Node):
    body: tuple[Stmt, ...]


COMPARISON_OPS = ("==", "!=", "<=", ">=", "<", ">")
ARITH_OPS = ("+", "-", "*", "/")
