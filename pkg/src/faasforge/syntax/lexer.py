"""Tokenizer with indentation tracking."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List

from .nodes import Span


class SyntaxFault(Exception):
    """Base class for lexing and parsing failures."""

    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


class LexError(SyntaxFault):
    pass


NAME, NUMBER, STRING, OP, NEWLINE, INDENT, DEDENT, EOF = (
    "NAME", "NUMBER", "STRING", "OP", "NEWLINE", "INDENT", "DEDENT", "EOF",
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.text)

    @property
    def span(self) -> Span:
        return Span(self.line, self.column, len(self.text), self.offset)

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


_STRING_START = re.compile(r"([rRbBuUfF]{0,2})('''|\"\"\"|'|\")")
_NUMBER = re.compile(
    r"0[xX][0-9a-fA-F_]+|0[oO][0-7_]+|0[bB][01_]+"
    r"|(?:\d[\d_]*\.?[\d_]*|\.\d[\d_]*)(?:[eE][+-]?\d[\d_]*)?[jJ]?"
)
_NAME = re.compile(r"[^\W\d]\w*")
_OPERATORS = sorted(
    """
    **= //= >>= <<= ... -> := == != <= >= += -= *= /= %= &= |= ^= @= ** // << >>
    + - * / % < > = ( ) [ ] { } , : . ; @ & | ^ ~ !
    """.split(),
    key=len,
    reverse=True,
)
_OPEN = "([{"
_CLOSE = ")]}"


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens, synthesising NEWLINE/INDENT/DEDENT."""
    tokens: List[Token] = []
    indents = [0]
    depth = 0
    pos = 0
    line = 1
    line_start = 0
    at_line_start = True
    n = len(text)

    def col(p: int) -> int:
        return p - line_start + 1

    while pos < n:
        if at_line_start and depth == 0:
            # measure indentation of a logical line
            p = pos
            while p < n and text[p] == " ":
                p += 1
            if p < n and text[p] == "\t":
                raise LexError("tab in indentation", Span(line, col(p), 1, p))
            if p >= n:
                pos = p
                break
            ch = text[p]
            if ch in "\r\n" or ch == "#":
                # blank or comment-only line
                while p < n and text[p] not in "\r\n":
                    p += 1
                if p < n and text[p] == "\r" and p + 1 < n and text[p + 1] == "\n":
                    p += 1
                pos = p + 1
                line += 1
                line_start = pos
                continue
            width = p - pos
            if width > indents[-1]:
                indents.append(width)
                tokens.append(Token(INDENT, "", line, 1, pos))
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(Token(DEDENT, "", line, col(p), p))
                if width != indents[-1]:
                    raise LexError("inconsistent dedent", Span(line, col(p), 1, p))
            pos = p
            at_line_start = False
            continue

        ch = text[pos]
        if ch == " " or ch == "\t" or ch == "\f":
            pos += 1
            continue
        if ch == "#":
            while pos < n and text[pos] not in "\r\n":
                pos += 1
            continue
        if ch == "\\" and pos + 1 < n and text[pos + 1] in "\r\n":
            pos += 3 if text.startswith("\r\n", pos + 1) else 2
            line += 1
            line_start = pos
            continue
        if ch in "\r\n":
            end = pos + 2 if text.startswith("\r\n", pos) else pos + 1
            if depth == 0:
                tokens.append(Token(NEWLINE, text[pos:end], line, col(pos), pos))
                at_line_start = True
            pos = end
            line += 1
            line_start = pos
            continue

        m = _STRING_START.match(text, pos)
        if m:
            quote = m.group(2)
            p = m.end()
            while True:
                if p >= n:
                    raise LexError("unterminated string", Span(line, col(pos), 1, pos))
                c = text[p]
                if c == "\\":
                    p += 2
                    continue
                if text.startswith(quote, p):
                    p += len(quote)
                    break
                if c == "\n" and len(quote) == 1:
                    raise LexError("unterminated string", Span(line, col(pos), 1, pos))
                p += 1
            tok_text = text[pos:p]
            tokens.append(Token(STRING, tok_text, line, col(pos), pos))
            newlines = tok_text.count("\n")
            if newlines:
                line += newlines
                line_start = pos + tok_text.rfind("\n") + 1
            pos = p
            continue

        if ch.isdigit() or (ch == "." and pos + 1 < n and text[pos + 1].isdigit()):
            m = _NUMBER.match(text, pos)
            tokens.append(Token(NUMBER, m.group(), line, col(pos), pos))
            pos = m.end()
            continue

        m = _NAME.match(text, pos)
        if m:
            tokens.append(Token(NAME, m.group(), line, col(pos), pos))
            pos = m.end()
            continue

        for op in _OPERATORS:
            if text.startswith(op, pos):
                if op in _OPEN:
                    depth += 1
                elif op in _CLOSE:
                    depth = max(0, depth - 1)
                tokens.append(Token(OP, op, line, col(pos), pos))
                pos += len(op)
                break
        else:
            raise LexError(f"unexpected character {ch!r}", Span(line, col(pos), 1, pos))

    if tokens and tokens[-1].kind not in (NEWLINE, DEDENT):
        tokens.append(Token(NEWLINE, "", line, col(pos), pos))
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token(DEDENT, "", line, col(pos), pos))
    tokens.append(Token(EOF, "", line, col(pos), pos))
    return tokens
