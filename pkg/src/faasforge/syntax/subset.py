"""Static feasibility check: is every node inside the supported subset?"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

from . import nodes as n


@dataclass(frozen=True)
class SubsetViolation:
    span: n.Span
    construct: str
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.construct}: {self.message}"


_MESSAGES = {
    "anonymous function": "inline anonymous functions cannot be transformed",
    "keyword argument": "calls accept positional arguments only",
    "default argument": "parameters cannot have default values",
    "star argument": "variadic arguments are not supported",
    "decorator": "decorators are not supported",
    "generator": "generators are not supported",
    "comprehension": "comprehensions are not supported",
    "inheritance": "classes cannot have base classes",
    "exception handling": "exceptions are not supported",
}


def _is_constant(e: n.Expr) -> bool:
    if isinstance(e, (n.IntLit, n.FloatLit, n.StrLit, n.BoolLit, n.NoneLit)):
        return True
    if isinstance(e, (n.ListLit, n.TupleLit)):
        return all(_is_constant(x) for x in e.elts)
    if isinstance(e, n.MapLit):
        return all(_is_constant(v) for v in e.values)
    if isinstance(e, n.BinOp):
        return _is_constant(e.left) and _is_constant(e.right)
    if isinstance(e, n.UnaryOp):
        return _is_constant(e.operand)
    return False


def is_constant_initializer(e: n.Expr) -> bool:
    """True for literals and arithmetic over literals."""
    return _is_constant(e)


def _is_docstring(s: n.Stmt) -> bool:
    return isinstance(s, n.ExprStmt) and isinstance(s.value, n.StrLit)


class _Checker:
    def __init__(self):
        self.found: List[SubsetViolation] = []

    def report(self, node: n.Node, construct: str, message: str = ""):
        self.found.append(SubsetViolation(node.span, construct, message or _MESSAGES.get(construct, construct + " is outside the supported subset")))

    def module(self, mod: n.Module):
        guards = 0
        for stmt in mod.body:
            if isinstance(stmt, n.MainGuard):
                guards += 1
                if guards > 1:
                    self.report(stmt, "multiple main guards")
                self.block(stmt.body, in_function=False)
            elif isinstance(stmt, n.FunctionDef):
                self.function(stmt)
            elif isinstance(stmt, n.ClassDef):
                self.classdef(stmt)
            elif isinstance(stmt, n.Assign):
                if not isinstance(stmt.target, n.Name):
                    self.report(stmt, "top-level statement", "only plain names may be assigned at top level")
                elif not _is_constant(stmt.value):
                    self.report(stmt, "computed global initializer",
                                "global initializers must be literals or arithmetic over literals")
                self.expr(stmt.value)
            elif isinstance(stmt, (n.Import, n.Pass)) or _is_docstring(stmt):
                continue
            elif isinstance(stmt, n.Unsupported):
                self.unsupported(stmt, in_function=False)
            else:
                self.report(stmt, "top-level statement",
                            "statements outside definitions must live in the main guard")
                self.stmt(stmt, in_function=False)

    def function(self, fn: n.FunctionDef):
        self.block(fn.body, in_function=True)

    def classdef(self, cls: n.ClassDef):
        for member in cls.methods:
            if isinstance(member, n.FunctionDef):
                if not member.params:
                    self.report(member, "method without receiver", "methods must take self as first parameter")
                self.function(member)
            elif isinstance(member, n.Pass) or _is_docstring(member):
                continue
            elif isinstance(member, n.Unsupported):
                self.unsupported(member, in_function=False)
            else:
                self.report(member, "class attribute", "class bodies may only contain method definitions")

    def block(self, body, in_function: bool):
        for stmt in body:
            self.stmt(stmt, in_function)

    def stmt(self, s: n.Stmt, in_function: bool):
        if isinstance(s, (n.FunctionDef, n.ClassDef)):
            self.report(s, "nested definition", "functions and classes must be defined at top level")
            return
        if isinstance(s, n.Unsupported):
            self.unsupported(s, in_function)
            return
        if isinstance(s, n.Return):
            if not in_function:
                self.report(s, "return outside function")
            if s.value is not None:
                self.expr(s.value)
        elif isinstance(s, n.GlobalDecl):
            if not in_function:
                self.report(s, "global declaration outside function")
        elif isinstance(s, (n.ExprStmt,)):
            self.expr(s.value)
        elif isinstance(s, n.Assign):
            self.expr(s.target)
            self.expr(s.value)
        elif isinstance(s, n.AugAssign):
            self.expr(s.target)
            self.expr(s.value)
        elif isinstance(s, n.If):
            for test, body in s.branches:
                self.expr(test)
                self.block(body, in_function)
            self.block(s.orelse, in_function)
        elif isinstance(s, n.While):
            self.expr(s.test)
            self.block(s.body, in_function)
        elif isinstance(s, n.ForRange):
            for a in s.args:
                self.expr(a)
            self.block(s.body, in_function)
        elif isinstance(s, n.Import):
            pass
        elif isinstance(s, n.Pass):
            pass
        elif isinstance(s, n.MainGuard):
            self.report(s, "nested main guard")

    def unsupported(self, u: n.Unsupported, in_function: bool):
        self.report(u, u.construct)
        for child in u.children:
            if isinstance(child, n.FunctionDef):
                self.function(child)
            elif isinstance(child, n.ClassDef):
                self.classdef(child)
            elif isinstance(child, n.Unsupported):
                self.unsupported(child, in_function)
            elif isinstance(child, n.Stmt) and not isinstance(child, n.Expr):
                self.stmt(child, in_function)
            else:
                self.expr(child)

    def expr(self, e: n.Expr):
        if isinstance(e, n.Unsupported):
            self.unsupported(e, True)
            return
        if isinstance(e, n.Call):
            if isinstance(e.func, n.Name) and e.func.id == "range":
                self.report(e, "range outside for loop", "range() may only appear as a for-loop iterable")
        elif isinstance(e, n.MapLit):
            for k in e.keys:
                if not isinstance(k, n.StrLit):
                    self.report(k, "non-string map key", "map literal keys must be string literals")
        for child in n.iter_children(e):
            self.expr(child)


def check_subset(tree: n.Module) -> List[SubsetViolation]:
    """Return all subset violations in ``tree`` sorted by source position."""
    checker = _Checker()
    checker.module(tree)
    return sorted(checker.found, key=lambda v: (v.span.offset, v.span.line, v.span.column, v.construct))
