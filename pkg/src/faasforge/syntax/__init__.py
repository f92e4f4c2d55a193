"""Tokenize, parse, validate and re-emit source text of the language subset."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import nodes
from .emitter import emit, emit_expr
from .lexer import LexError, SyntaxFault, tokenize
from .nodes import Span
from .parser import ParseError, parse, parse_expression
from .subset import SubsetViolation, check_subset, is_constant_initializer

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class SourceModule:
    name: str
    text: str
    tree: nodes.Module = field(compare=False, repr=False)

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise ValueError(f"invalid module name {self.name!r}")

    @classmethod
    def from_text(cls, name: str, text: str) -> "SourceModule":
        return cls(name, text, parse(text))

    @classmethod
    def from_path(cls, path) -> "SourceModule":
        path = Path(path)
        name = path.name[:-3] if path.name.endswith(".py") else path.name
        return cls.from_text(name, path.read_text(encoding="utf-8"))


__all__ = [
    "LexError", "ParseError", "SourceModule", "Span", "SubsetViolation", "SyntaxFault",
    "check_subset", "emit", "emit_expr", "is_constant_initializer", "nodes", "parse",
    "parse_expression", "tokenize",
]
