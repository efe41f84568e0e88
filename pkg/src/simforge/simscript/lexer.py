"""SimScript lexer: indentation-aware, line oriented.

Blocks follow leading-space indentation (tabs are illegal). Comments run
from ``#`` to end of line. Blank and comment-only lines produce no tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = frozenset({"if", "elif", "else", "while", "for", "in", "range", "pass", "True", "False"})

_NUMBER_RE = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?", re.ASCII)
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_DIGITS = frozenset("0123456789")
_NAME_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
# longest first so '==' wins over '='
_OPERATORS = ("==", "!=", "<=", ">=", "=", "<", ">", "+", "-", "*", "/",
              "(", ")", "[", "]", ",", ".", ":")


@dataclass(frozen=True)
class Token:
    type: str  # NAME NUMBER STRING NEWLINE INDENT DEDENT EOF keyword or operator literal
    value: str
    line: int
    col: int

    @property
    def span(self) -> tuple[int, int]:
        return (self.line, self.col)


class LexError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


class IllegalCharacter(LexError):
    def __init__(self, char: str, line: int, col: int):
        super().__init__(f"illegal character {char!r}", line, col)
        self.char = char


class IndentationMismatch(LexError):
    def __init__(self, line: int):
        super().__init__("dedent does not match any outer indentation level", line, 1)


def _strip_comment(line: str) -> str:
    """Drop '#'-to-EOL, respecting string literals."""
    quote: str | None = None
    for i, ch in enumerate(line):
        if quote:
            if ch == quote:
                quote = None
        elif ch in "'\"":
            quote = ch
        elif ch == "#":
            return line[:i]
    return line


def lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    indents = [0]
    last_line_no = 0

    for line_no, raw_line in enumerate(source.split("\n"), start=1):
        last_line_no = line_no
        if "\t" in raw_line:
            raise IllegalCharacter("\t", line_no, raw_line.index("\t") + 1)
        line = _strip_comment(raw_line)
        if not line.strip():
            continue

        indent = len(line) - len(line.lstrip(" "))
        if indent > indents[-1]:
            indents.append(indent)
            tokens.append(Token("INDENT", "", line_no, 1))
        else:
            while indent < indents[-1]:
                indents.pop()
                tokens.append(Token("DEDENT", "", line_no, 1))
            if indent != indents[-1]:
                raise IndentationMismatch(line_no)

        pos = indent
        end = len(line)
        while pos < end:
            ch = line[pos]
            col = pos + 1
            if ch == " ":
                pos += 1
                continue
            if ch in _DIGITS:
                m = _NUMBER_RE.match(line, pos)
                assert m is not None
                tokens.append(Token("NUMBER", m.group(), line_no, col))
                pos = m.end()
                continue
            if ch in _NAME_START:
                m = _NAME_RE.match(line, pos)
                assert m is not None
                word = m.group()
                tokens.append(Token(word if word in KEYWORDS else "NAME", word, line_no, col))
                pos = m.end()
                continue
            if ch in "'\"":
                closing = line.find(ch, pos + 1)
                if closing == -1:
                    raise IllegalCharacter(ch, line_no, col)  # unterminated string literal
                tokens.append(Token("STRING", line[pos + 1:closing], line_no, col))
                pos = closing + 1
                continue
            for op in _OPERATORS:
                if line.startswith(op, pos):
                    tokens.append(Token(op, op, line_no, col))
                    pos += len(op)
                    break
            else:
                raise IllegalCharacter(ch, line_no, col)
        tokens.append(Token("NEWLINE", "", line_no, end + 1))

    closing_line = last_line_no + 1
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token("DEDENT", "", closing_line, 1))
    tokens.append(Token("EOF", "", closing_line, 1))
    return tokens
