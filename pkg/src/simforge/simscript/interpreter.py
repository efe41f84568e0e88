"""Tree-walking SimScript interpreter.

Execution is deterministic given (program, seed, limits): the three sampler
builtins consume a single SplitMix64 stream in program order. There is no
escape hatch into the host runtime; the only effects a program can have are
the record/mark_event/plot_decl output channels captured in RunResult.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..rng import SplitMix64
from .builtins_table import BUILTINS
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

Value = float | bool | str | list


@dataclass(frozen=True)
class ExecLimits:
    max_steps: int = 10_000_000
    max_series_points: int = 1_000_000

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.max_series_points <= 0:
            raise ValueError("execution limits must be positive")


@dataclass
class RunResult:
    """One reproducible run: recorded series, event markers, summary stats.

    Points within each series are in non-decreasing x order for every engine
    and emitted-program run (the dynamic validation checks re-verify this for
    foreign programs).
    """

    series: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    events: list[tuple[str, float]] = field(default_factory=list)
    summary: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    steps_used: int = 0
    plot: dict | None = None


class ExecError(Exception):
    def __init__(self, message: str, span: tuple[int, int] = (0, 0)):
        if span != (0, 0):
            message = f"{message} (line {span[0]}, col {span[1]})"
        super().__init__(message)
        self.span = span


class StepBudgetExceeded(ExecError):
    def __init__(self, max_steps: int):
        super().__init__(f"step budget of {max_steps} exceeded")


class SeriesBudgetExceeded(ExecError):
    def __init__(self, max_points: int):
        super().__init__(f"series budget of {max_points} points exceeded")


class RuntimeTypeError(ExecError):
    pass


class DivisionByZero(ExecError):
    def __init__(self, span: tuple[int, int]):
        super().__init__("division by zero", span)


def _type_name(value: Value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    return "list"


class _Interpreter:
    def __init__(self, seed: int, limits: ExecLimits):
        self.rng = SplitMix64(seed)
        self.limits = limits
        self.env: dict[str, Value] = {}
        self.result = RunResult(seed=seed)
        self._points = 0

    # --- bookkeeping ---

    def tick(self) -> None:
        self.result.steps_used += 1
        if self.result.steps_used > self.limits.max_steps:
            raise StepBudgetExceeded(self.limits.max_steps)

    def require_number(self, value: Value, what: str, span: tuple[int, int]) -> float:
        if isinstance(value, bool) or not isinstance(value, float):
            raise RuntimeTypeError(f"{what} must be a number, got {_type_name(value)}", span)
        return value

    def require_integer(self, value: Value, what: str, span: tuple[int, int]) -> int:
        number = self.require_number(value, what, span)
        if number != int(number):
            raise RuntimeTypeError(f"{what} must be an integer, got {number}", span)
        return int(number)

    # --- statements ---

    def run_block(self, body: tuple[Stmt, ...]) -> None:
        for stmt in body:
            self.execute(stmt)

    def execute(self, stmt: Stmt) -> None:
        self.tick()
        if isinstance(stmt, Assign):
            self.env[stmt.target] = self.evaluate(stmt.value)
        elif isinstance(stmt, Append):
            target = self.env.get(stmt.target)
            if not isinstance(target, list):
                raise RuntimeTypeError(f"'{stmt.target}' is not a list", stmt.span)
            target.append(self.evaluate(stmt.value))
        elif isinstance(stmt, ExprStmt):
            self.call(stmt.expr, as_statement=True)
        elif isinstance(stmt, Pass):
            pass
        elif isinstance(stmt, If):
            if self.truthy(self.evaluate(stmt.cond), stmt.cond):
                self.run_block(stmt.body)
            elif stmt.orelse:
                self.run_block(stmt.orelse)
        elif isinstance(stmt, While):
            while True:
                if not self.truthy(self.evaluate(stmt.cond), stmt.cond):
                    break
                self.run_block(stmt.body)
                self.tick()  # each loop turn costs a step even if the body is all pass
        elif isinstance(stmt, ForRange):
            start = 0 if stmt.start is None else self.require_integer(
                self.evaluate(stmt.start), "range start", stmt.span)
            stop = self.require_integer(self.evaluate(stmt.stop), "range stop", stmt.span)
            for i in range(start, stop):
                self.tick()
                self.env[stmt.var] = float(i)
                self.run_block(stmt.body)
        else:
            raise TypeError(f"unknown statement node {stmt!r}")

    def truthy(self, value: Value, expr: Expr) -> bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, float):
            return value != 0.0
        raise RuntimeTypeError(f"condition must be a number or boolean, got {_type_name(value)}", expr.span)

    # --- expressions ---

    def evaluate(self, expr: Expr) -> Value:
        if isinstance(expr, Num):
            return expr.value
        if isinstance(expr, Str):
            return expr.value
        if isinstance(expr, Bool):
            return expr.value
        if isinstance(expr, Name):
            try:
                return self.env[expr.ident]
            except KeyError:
                raise RuntimeTypeError(f"'{expr.ident}' is not assigned", expr.span) from None
        if isinstance(expr, ListLit):
            return [self.evaluate(item) for item in expr.items]
        if isinstance(expr, Index):
            base = self.evaluate(expr.base)
            if not isinstance(base, list):
                raise RuntimeTypeError(f"cannot index a {_type_name(base)}", expr.span)
            index = self.require_integer(self.evaluate(expr.index), "list index", expr.span)
            if not 0 <= index < len(base):
                raise RuntimeTypeError(f"list index {index} out of range (length {len(base)})", expr.span)
            return base[index]
        if isinstance(expr, UnaryOp):
            operand = self.require_number(self.evaluate(expr.operand), "operand of unary '-'", expr.span)
            return -operand
        if isinstance(expr, BinOp):
            return self.binop(expr)
        if isinstance(expr, Call):
            return self.call(expr, as_statement=False)
        raise TypeError(f"unknown expression node {expr!r}")

    def binop(self, expr: BinOp) -> Value:
        left = self.require_number(self.evaluate(expr.left), f"left operand of '{expr.op}'", expr.span)
        right = self.require_number(self.evaluate(expr.right), f"right operand of '{expr.op}'", expr.span)
        op = expr.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if right == 0.0:
                raise DivisionByZero(expr.span)
            return left / right
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        raise TypeError(f"unknown operator {op!r}")

    def call(self, expr: Call, as_statement: bool) -> Value:
        if expr.func not in BUILTINS:
            raise RuntimeTypeError(f"no builtin named '{expr.func}'", expr.span)
        arity, is_output = BUILTINS[expr.func]
        if len(expr.args) != arity:
            raise RuntimeTypeError(
                f"'{expr.func}' takes {arity} argument(s), got {len(expr.args)}", expr.span)
        if is_output and not as_statement:
            raise RuntimeTypeError(f"'{expr.func}' produces no value", expr.span)
        args = [self.evaluate(a) for a in expr.args]
        name = expr.func

        if name == "rand_uniform":
            low = self.require_number(args[0], "rand_uniform low", expr.span)
            high = self.require_number(args[1], "rand_uniform high", expr.span)
            if low > high:
                raise RuntimeTypeError("rand_uniform requires low <= high", expr.span)
            return self.rng.uniform(low, high)
        if name == "rand_uniform_int":
            low = self.require_integer(args[0], "rand_uniform_int low", expr.span)
            high = self.require_integer(args[1], "rand_uniform_int high", expr.span)
            if low > high:
                raise RuntimeTypeError("rand_uniform_int requires low <= high", expr.span)
            return float(self.rng.uniform_int(low, high))
        if name == "rand_exp":
            mean = self.require_number(args[0], "rand_exp mean", expr.span)
            if mean <= 0:
                raise RuntimeTypeError("rand_exp requires mean > 0", expr.span)
            return self.rng.exponential(mean)
        if name == "floor":
            return float(math.floor(self.require_number(args[0], "floor argument", expr.span)))
        if name == "record":
            if not isinstance(args[0], str):
                raise RuntimeTypeError("record series name must be a string", expr.span)
            x = self.require_number(args[1], "record x", expr.span)
            y = self.require_number(args[2], "record y", expr.span)
            self._points += 1
            if self._points > self.limits.max_series_points:
                raise SeriesBudgetExceeded(self.limits.max_series_points)
            self.result.series.setdefault(args[0], []).append((x, y))
            return True
        if name == "mark_event":
            if not isinstance(args[0], str):
                raise RuntimeTypeError("mark_event name must be a string", expr.span)
            x = self.require_number(args[1], "mark_event x", expr.span)
            self.result.events.append((args[0], x))
            return True
        if name == "plot_decl":
            xlabel, ylabel = args[0], args[1]
            if not isinstance(xlabel, str) or not isinstance(ylabel, str):
                raise RuntimeTypeError("plot_decl labels must be strings", expr.span)
            self.result.plot = {
                "xlabel": xlabel,
                "ylabel": ylabel,
                "grid": self.truthy(args[2], expr),
                "legend": self.truthy(args[3], expr),
            }
            return True
        raise TypeError(f"builtin {name!r} has no implementation")


def interpret(program: Program, seed: int, limits: ExecLimits | None = None) -> RunResult:
    runner = _Interpreter(seed, limits or ExecLimits())
    runner.run_block(program.body)
    return runner.result
