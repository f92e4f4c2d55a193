"""Syntax tree node types for the supported language subset.

Every node carries a :class:`Span`.  Spans are excluded from equality so two
trees compare structurally regardless of where their text came from.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Tuple, Union


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    column: int
    length: int
    offset: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


NO_SPAN = Span(0, 0, 0, 0)


def _span():
    return field(default=NO_SPAN, compare=False, repr=False)


class Node:
    __slots__ = ()


class Expr(Node):
    __slots__ = ()


class Stmt(Node):
    __slots__ = ()


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class IntLit(Expr):
    value: int
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class FloatLit(Expr):
    value: float
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class StrLit(Expr):
    value: str
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class BoolLit(Expr):
    value: bool
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class NoneLit(Expr):
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class ListLit(Expr):
    elts: Tuple[Expr, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class TupleLit(Expr):
    elts: Tuple[Expr, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class MapLit(Expr):
    keys: Tuple[Expr, ...]
    values: Tuple[Expr, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Name(Expr):
    id: str
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Attribute(Expr):
    value: Expr
    attr: str
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Subscript(Expr):
    value: Expr
    index: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Call(Expr):
    func: Expr
    args: Tuple[Expr, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    left: Expr
    op: str
    right: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class UnaryOp(Expr):
    op: str
    operand: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Compare(Expr):
    left: Expr
    ops: Tuple[str, ...]
    comparators: Tuple[Expr, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class BoolOp(Expr):
    op: str
    values: Tuple[Expr, ...]
    span: Span = _span()


# -- statements --------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Module(Node):
    body: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Import(Stmt):
    names: Tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class FunctionDef(Stmt):
    name: str
    params: Tuple[str, ...]
    body: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class ClassDef(Stmt):
    name: str
    methods: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Assign(Stmt):
    target: Expr
    value: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class AugAssign(Stmt):
    target: Expr
    op: str
    value: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Return(Stmt):
    value: Optional[Expr]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class If(Stmt):
    # branches[0] is the `if`, the rest are `elif`s
    branches: Tuple[Tuple[Expr, Tuple[Stmt, ...]], ...]
    orelse: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class While(Stmt):
    test: Expr
    body: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class ForRange(Stmt):
    var: str
    args: Tuple[Expr, ...]
    body: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class GlobalDecl(Stmt):
    names: Tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class ExprStmt(Stmt):
    value: Expr
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class MainGuard(Stmt):
    body: Tuple[Stmt, ...]
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Pass(Stmt):
    span: Span = _span()


@dataclass(frozen=True, slots=True)
class Unsupported(Expr, Stmt):
    """Placeholder for a recognised construct that lies outside the subset.

    The parser keeps going past these so that every offending construct in a
    file can be reported at once.  ``text`` is the original source slice.
    """

    construct: str
    text: str
    children: Tuple[Node, ...] = ()
    span: Span = _span()


AnyNode = Union[Expr, Stmt, Module]


def iter_children(node: Node) -> Iterator[Node]:
    """Yield the direct child nodes of ``node`` in source order."""
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        yield from _flatten(value)


def _flatten(value) -> Iterator[Node]:
    if isinstance(value, Node):
        yield value
    elif isinstance(value, tuple):
        for item in value:
            yield from _flatten(item)


def walk(node: Node) -> Iterator[Node]:
    """Pre-order traversal of ``node`` and all its descendants."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        children = list(iter_children(current))
        stack.extend(reversed(children))
