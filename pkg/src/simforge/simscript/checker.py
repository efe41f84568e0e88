"""Static checks run before a program is allowed to execute.

Two kinds of findings: violations (use before assignment, unknown or misused
builtins) block execution in gated mode; warnings (the while-loop termination
lint) are surfaced for the reviewing expert but do not block.
"""

from __future__ import annotations

from dataclasses import dataclass

from .builtins_table import BUILTINS, OUTPUT_BUILTINS
from .nodes import (
    Append,
    Assign,
    BinOp,
    Bool,
    Call,
    Expr,
    ExprStmt,
    ForRange,
    If,
    Index,
    ListLit,
    Name,
    Num,
    Pass,
    Program,
    Stmt,
    Str,
    UnaryOp,
    While,
)


@dataclass(frozen=True)
class StaticIssue:
    code: str
    message: str
    span: tuple[int, int]

    def __str__(self) -> str:
        return f"{self.code}: {self.message} (line {self.span[0]}, col {self.span[1]})"


@dataclass(frozen=True)
class StaticReport:
    violations: tuple[StaticIssue, ...]
    warnings: tuple[StaticIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class _Checker:
    def __init__(self) -> None:
        self.violations: list[StaticIssue] = []
        self.warnings: list[StaticIssue] = []

    def check_expr(self, expr: Expr, assigned: set[str], as_statement: bool = False) -> None:
        if isinstance(expr, (Num, Str, Bool)):
            return
        if isinstance(expr, Name):
            if expr.ident not in assigned:
                kind = "builtin used as a value" if expr.ident in BUILTINS else "use before assignment"
                self.violations.append(StaticIssue("use-before-assign", f"{kind}: '{expr.ident}'", expr.span))
            return
        if isinstance(expr, ListLit):
            for item in expr.items:
                self.check_expr(item, assigned)
            return
        if isinstance(expr, Index):
            self.check_expr(expr.base, assigned)
            self.check_expr(expr.index, assigned)
            return
        if isinstance(expr, UnaryOp):
            self.check_expr(expr.operand, assigned)
            return
        if isinstance(expr, BinOp):
            self.check_expr(expr.left, assigned)
            self.check_expr(expr.right, assigned)
            return
        if isinstance(expr, Call):
            if expr.func not in BUILTINS:
                self.violations.append(StaticIssue("unknown-builtin", f"no builtin named '{expr.func}'", expr.span))
            else:
                arity, _ = BUILTINS[expr.func]
                if len(expr.args) != arity:
                    self.violations.append(StaticIssue(
                        "wrong-arity",
                        f"'{expr.func}' takes {arity} argument(s), got {len(expr.args)}", expr.span))
                if expr.func in OUTPUT_BUILTINS and not as_statement:
                    self.violations.append(StaticIssue(
                        "output-in-expression",
                        f"'{expr.func}' produces no value and must be a bare statement", expr.span))
            for arg in expr.args:
                self.check_expr(arg, assigned)
            return
        raise TypeError(f"unknown expression node {expr!r}")

    def check_block(self, body: tuple[Stmt, ...], assigned: set[str]) -> set[str]:
        """Returns the set of names definitely assigned after the block."""
        current = set(assigned)
        for stmt in body:
            if isinstance(stmt, Assign):
                self.check_expr(stmt.value, current)
                current.add(stmt.target)
            elif isinstance(stmt, Append):
                if stmt.target not in current:
                    self.violations.append(StaticIssue(
                        "use-before-assign", f"use before assignment: '{stmt.target}'", stmt.span))
                self.check_expr(stmt.value, current)
            elif isinstance(stmt, ExprStmt):
                self.check_expr(stmt.expr, current, as_statement=True)
            elif isinstance(stmt, Pass):
                pass
            elif isinstance(stmt, If):
                self.check_expr(stmt.cond, current)
                after_then = self.check_block(stmt.body, current)
                after_else = self.check_block(stmt.orelse, current) if stmt.orelse else set(current)
                current = after_then & after_else
            elif isinstance(stmt, While):
                self.check_expr(stmt.cond, current)
                self.check_block(stmt.body, current)
                self.lint_while(stmt)
                # body may run zero times: no new definite assignments
            elif isinstance(stmt, ForRange):
                if stmt.start is not None:
                    self.check_expr(stmt.start, current)
                self.check_expr(stmt.stop, current)
                self.check_block(stmt.body, current | {stmt.var})
                # range may be empty: neither the body's names nor the loop
                # variable are definitely assigned afterwards
            else:
                raise TypeError(f"unknown statement node {stmt!r}")
        return current

    def lint_while(self, stmt: While) -> None:
        cond_names = _names_in(stmt.cond)
        if cond_names & _assigned_in(stmt.body):
            return
        self.warnings.append(StaticIssue(
            "termination-lint",
            "while loop body never assigns a variable used in its condition", stmt.span))


def _names_in(expr: Expr) -> set[str]:
    if isinstance(expr, Name):
        return {expr.ident}
    if isinstance(expr, (Num, Str, Bool)):
        return set()
    if isinstance(expr, ListLit):
        return set().union(*(_names_in(i) for i in expr.items)) if expr.items else set()
    if isinstance(expr, Index):
        return _names_in(expr.base) | _names_in(expr.index)
    if isinstance(expr, UnaryOp):
        return _names_in(expr.operand)
    if isinstance(expr, BinOp):
        return _names_in(expr.left) | _names_in(expr.right)
    if isinstance(expr, Call):
        return set().union(*(_names_in(a) for a in expr.args)) if expr.args else set()
    raise TypeError(f"unknown expression node {expr!r}")


def _assigned_in(body: tuple[Stmt, ...]) -> set[str]:
    names: set[str] = set()
    for stmt in body:
        if isinstance(stmt, Assign):
            names.add(stmt.target)
        elif isinstance(stmt, ForRange):
            names.add(stmt.var)
            names |= _assigned_in(stmt.body)
        elif isinstance(stmt, If):
            names |= _assigned_in(stmt.body) | _assigned_in(stmt.orelse)
        elif isinstance(stmt, While):
            names |= _assigned_in(stmt.body)
    return names


def static_check(program: Program) -> StaticReport:
    checker = _Checker()
    checker.check_block(program.body, set())
    return StaticReport(tuple(checker.violations), tuple(checker.warnings))
