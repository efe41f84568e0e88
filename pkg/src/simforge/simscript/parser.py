"""Recursive-descent parser and source printer for SimScript."""

from __future__ import annotations

from .lexer import Token, lex
from .nodes import (
    ARITH_OPS,
    COMPARISON_OPS,
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


class ParseError(Exception):
    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(f"{message} at line {span[0]}, column {span[1]}")
        self.span = span


class UnexpectedToken(ParseError):
    def __init__(self, token: Token, expected: str):
        shown = token.value or token.type
        super().__init__(f"unexpected {shown!r}, expected {expected}", token.span)
        self.token = token
        self.expected = expected


class UnterminatedBlock(ParseError):
    def __init__(self, span: tuple[int, int]):
        super().__init__("block has no statements", span)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def expect(self, type_: str) -> Token:
        tok = self.peek()
        if tok.type != type_:
            raise UnexpectedToken(tok, type_)
        return self.advance()

    # --- statements ---

    def parse_program(self) -> Program:
        body = []
        while self.peek().type != "EOF":
            body.append(self.statement())
        return Program(body=tuple(body), span=(1, 1))

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.type == "if":
            return self.if_stmt()
        if tok.type == "while":
            return self.while_stmt()
        if tok.type == "for":
            return self.for_stmt()
        stmt = self.simple_stmt()
        self.expect("NEWLINE")
        return stmt

    def simple_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.type == "pass":
            self.advance()
            return Pass(span=tok.span)
        if tok.type == "NAME":
            nxt = self.tokens[self.pos + 1]
            if nxt.type == "=":
                self.advance()
                self.advance()
                return Assign(target=tok.value, value=self.expression(), span=tok.span)
            if nxt.type == ".":
                self.advance()
                self.advance()
                method = self.expect("NAME")
                if method.value != "append":
                    raise UnexpectedToken(method, "'append'")
                self.expect("(")
                value = self.expression()
                self.expect(")")
                return Append(target=tok.value, value=value, span=tok.span)
            if nxt.type == "(":
                call = self.expression()
                if not isinstance(call, Call):
                    raise UnexpectedToken(self.peek(), "a builtin call")
                return ExprStmt(expr=call, span=tok.span)
        raise UnexpectedToken(tok, "a statement")

    def suite(self) -> tuple[Stmt, ...]:
        self.expect(":")
        if self.peek().type != "NEWLINE":
            stmt = self.simple_stmt()
            self.expect("NEWLINE")
            return (stmt,)
        newline = self.advance()
        if self.peek().type != "INDENT":
            raise UnterminatedBlock(newline.span)
        self.advance()
        body = []
        while self.peek().type not in ("DEDENT", "EOF"):
            body.append(self.statement())
        if self.peek().type == "DEDENT":
            self.advance()
        if not body:
            raise UnterminatedBlock(newline.span)
        return tuple(body)

    def if_stmt(self) -> If:
        start = self.expect("if")
        cond = self.expression()
        body = self.suite()
        orelse: tuple[Stmt, ...] = ()
        tok = self.peek()
        if tok.type == "elif":
            # desugar into a nested If in the else branch
            nested = self.if_stmt_from_elif()
            orelse = (nested,)
        elif tok.type == "else":
            self.advance()
            orelse = self.suite()
        return If(cond=cond, body=body, orelse=orelse, span=start.span)

    def if_stmt_from_elif(self) -> If:
        start = self.expect("elif")
        cond = self.expression()
        body = self.suite()
        orelse: tuple[Stmt, ...] = ()
        tok = self.peek()
        if tok.type == "elif":
            orelse = (self.if_stmt_from_elif(),)
        elif tok.type == "else":
            self.advance()
            orelse = self.suite()
        return If(cond=cond, body=body, orelse=orelse, span=start.span)

    def while_stmt(self) -> While:
        start = self.expect("while")
        cond = self.expression()
        body = self.suite()
        return While(cond=cond, body=body, span=start.span)

    def for_stmt(self) -> ForRange:
        start = self.expect("for")
        var = self.expect("NAME")
        self.expect("in")
        self.expect("range")
        self.expect("(")
        first = self.expression()
        second: Expr | None = None
        if self.peek().type == ",":
            self.advance()
            second = self.expression()
        self.expect(")")
        body = self.suite()
        if second is None:
            return ForRange(var=var.value, start=None, stop=first, body=body, span=start.span)
        return ForRange(var=var.value, start=first, stop=second, body=body, span=start.span)

    # --- expressions ---

    def expression(self) -> Expr:
        left = self.arith()
        tok = self.peek()
        if tok.type in COMPARISON_OPS:
            self.advance()
            right = self.arith()
            return BinOp(op=tok.type, left=left, right=right, span=tok.span)
        return left

    def arith(self) -> Expr:
        left = self.term()
        while self.peek().type in ("+", "-"):
            op = self.advance()
            right = self.term()
            left = BinOp(op=op.type, left=left, right=right, span=op.span)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.peek().type in ("*", "/"):
            op = self.advance()
            right = self.factor()
            left = BinOp(op=op.type, left=left, right=right, span=op.span)
        return left

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.type == "-":
            self.advance()
            return UnaryOp(op="-", operand=self.factor(), span=tok.span)
        return self.postfix()

    def postfix(self) -> Expr:
        expr = self.primary()
        while self.peek().type == "[":
            bracket = self.advance()
            index = self.expression()
            self.expect("]")
            expr = Index(base=expr, index=index, span=bracket.span)
        return expr

    def primary(self) -> Expr:
        tok = self.peek()
        if tok.type == "NUMBER":
            self.advance()
            return Num(value=float(tok.value), span=tok.span)
        if tok.type == "STRING":
            self.advance()
            return Str(value=tok.value, span=tok.span)
        if tok.type in ("True", "False"):
            self.advance()
            return Bool(value=tok.type == "True", span=tok.span)
        if tok.type == "NAME":
            self.advance()
            if self.peek().type == "(":
                self.advance()
                args = []
                if self.peek().type != ")":
                    args.append(self.expression())
                    while self.peek().type == ",":
                        self.advance()
                        args.append(self.expression())
                self.expect(")")
                return Call(func=tok.value, args=tuple(args), span=tok.span)
            return Name(ident=tok.value, span=tok.span)
        if tok.type == "(":
            self.advance()
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.type == "[":
            self.advance()
            items = []
            if self.peek().type != "]":
                items.append(self.expression())
                while self.peek().type == ",":
                    self.advance()
                    items.append(self.expression())
            self.expect("]")
            return ListLit(items=tuple(items), span=tok.span)
        raise UnexpectedToken(tok, "an expression")


def parse(tokens: list[Token]) -> Program:
    return _Parser(tokens).parse_program()


def parse_source(source: str) -> Program:
    return parse(lex(source))


# ---------------------------------------------------------------------------
# printer


def _format_num(value: float) -> str:
    if value == int(value) and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def expr_to_source(expr: Expr) -> str:
    if isinstance(expr, Num):
        return _format_num(expr.value)
    if isinstance(expr, Str):
        return f"'{expr.value}'"
    if isinstance(expr, Bool):
        return "True" if expr.value else "False"
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, ListLit):
        return "[" + ", ".join(expr_to_source(i) for i in expr.items) + "]"
    if isinstance(expr, Index):
        return f"{expr_to_source(expr.base)}[{expr_to_source(expr.index)}]"
    if isinstance(expr, UnaryOp):
        return f"-{_wrap(expr.operand, above_unary=True)}"
    if isinstance(expr, BinOp):
        return f"{_wrap(expr.left, parent=expr, side='left')} {expr.op} {_wrap(expr.right, parent=expr, side='right')}"
    if isinstance(expr, Call):
        return f"{expr.func}(" + ", ".join(expr_to_source(a) for a in expr.args) + ")"
    raise TypeError(f"unknown expression node {expr!r}")


_PRECEDENCE = {"==": 1, "!=": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
               "+": 2, "-": 2, "*": 3, "/": 3}


def _wrap(expr: Expr, parent: BinOp | None = None, side: str = "left",
          above_unary: bool = False) -> str:
    text = expr_to_source(expr)
    if isinstance(expr, BinOp):
        if above_unary:
            return f"({text})"
        if parent is not None:
            child_p = _PRECEDENCE[expr.op]
            parent_p = _PRECEDENCE[parent.op]
            if child_p < parent_p or (child_p == parent_p and side == "right"):
                return f"({text})"
    return text


def _stmt_lines(stmt: Stmt, depth: int) -> list[str]:
    pad = "    " * depth
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.target} = {expr_to_source(stmt.value)}"]
    if isinstance(stmt, Append):
        return [f"{pad}{stmt.target}.append({expr_to_source(stmt.value)})"]
    if isinstance(stmt, ExprStmt):
        return [f"{pad}{expr_to_source(stmt.expr)}"]
    if isinstance(stmt, Pass):
        return [f"{pad}pass"]
    if isinstance(stmt, If):
        lines = [f"{pad}if {expr_to_source(stmt.cond)}:"]
        for s in stmt.body:
            lines.extend(_stmt_lines(s, depth + 1))
        if stmt.orelse:
            lines.append(f"{pad}else:")
            for s in stmt.orelse:
                lines.extend(_stmt_lines(s, depth + 1))
        return lines
    if isinstance(stmt, While):
        lines = [f"{pad}while {expr_to_source(stmt.cond)}:"]
        for s in stmt.body:
            lines.extend(_stmt_lines(s, depth + 1))
        return lines
    if isinstance(stmt, ForRange):
        if stmt.start is None:
            header = f"{pad}for {stmt.var} in range({expr_to_source(stmt.stop)}):"
        else:
            header = (f"{pad}for {stmt.var} in "
                      f"range({expr_to_source(stmt.start)}, {expr_to_source(stmt.stop)}):")
        lines = [header]
        for s in stmt.body:
            lines.extend(_stmt_lines(s, depth + 1))
        return lines
    raise TypeError(f"unknown statement node {stmt!r}")


def to_source(program: Program) -> str:
    lines: list[str] = []
    for stmt in program.body:
        lines.extend(_stmt_lines(stmt, 0))
    return "\n".join(lines) + "\n"
