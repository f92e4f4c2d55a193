"""Deterministic source emission with minimal parenthesisation."""
from __future__ import annotations

import json
import math
from typing import List, Sequence

from . import nodes as n

INDENT = "    "

_BIN_PREC = {"+": 6, "-": 6, "*": 7, "/": 7, "//": 7, "%": 7, "**": 9}
_ATOM = 10
_UNARY_MINUS = 8


def emit(tree: n.Node) -> str:
    """Render a tree (usually a Module) as source text."""
    if isinstance(tree, n.Module):
        lines = _block(tree.body, 0)
    elif isinstance(tree, n.Stmt) and not isinstance(tree, n.Expr):
        lines = _stmt(tree, 0)
    else:
        return emit_expr(tree)
    return "".join(line + "\n" for line in lines)


def emit_expr(expr: n.Expr) -> str:
    return _expr(expr)


def _is_def(stmt: n.Stmt) -> bool:
    while isinstance(stmt, n.Unsupported) and stmt.children:
        stmt = stmt.children[0]
    return isinstance(stmt, (n.FunctionDef, n.ClassDef))


def _block(body: Sequence[n.Stmt], depth: int) -> List[str]:
    lines: List[str] = []
    prev = None
    for stmt in body:
        if prev is not None and (_is_def(prev) or _is_def(stmt)):
            lines.append("")
        lines.extend(_stmt(stmt, depth))
        prev = stmt
    return lines


def _suite(body: Sequence[n.Stmt], depth: int) -> List[str]:
    if not body:
        return [INDENT * (depth + 1) + "pass"]
    return _block(body, depth + 1)


def _stmt(s: n.Stmt, depth: int) -> List[str]:
    pad = INDENT * depth
    if isinstance(s, n.ExprStmt):
        return [pad + _expr(s.value)]
    if isinstance(s, n.Assign):
        return [f"{pad}{_expr(s.target)} = {_expr(s.value)}"]
    if isinstance(s, n.AugAssign):
        return [f"{pad}{_expr(s.target)} {s.op}= {_expr(s.value)}"]
    if isinstance(s, n.Return):
        if s.value is None:
            return [pad + "return"]
        return [f"{pad}return {_expr(s.value)}"]
    if isinstance(s, n.FunctionDef):
        head = f"{pad}def {s.name}({', '.join(s.params)}):"
        return [head] + _suite(s.body, depth)
    if isinstance(s, n.ClassDef):
        return [f"{pad}class {s.name}:"] + _suite(s.methods, depth)
    if isinstance(s, n.If):
        lines: List[str] = []
        for i, (test, body) in enumerate(s.branches):
            word = "if" if i == 0 else "elif"
            lines.append(f"{pad}{word} {_expr(test)}:")
            lines.extend(_suite(body, depth))
        if s.orelse:
            lines.append(pad + "else:")
            lines.extend(_suite(s.orelse, depth))
        return lines
    if isinstance(s, n.While):
        return [f"{pad}while {_expr(s.test)}:"] + _suite(s.body, depth)
    if isinstance(s, n.ForRange):
        args = ", ".join(_expr(a) for a in s.args)
        return [f"{pad}for {s.var} in range({args}):"] + _suite(s.body, depth)
    if isinstance(s, n.MainGuard):
        return [pad + 'if __name__ == "__main__":'] + _suite(s.body, depth)
    if isinstance(s, n.GlobalDecl):
        return [pad + "global " + ", ".join(s.names)]
    if isinstance(s, n.Import):
        return [pad + "import " + ", ".join(s.names)]
    if isinstance(s, n.Pass):
        return [pad + "pass"]
    if isinstance(s, n.Unsupported):
        # original text already carries its own inner indentation
        lines = s.text.splitlines() or [""]
        return [pad + lines[0]] + lines[1:]
    raise TypeError(f"cannot emit statement {type(s).__name__}")


def _prec(e: n.Expr) -> int:
    if isinstance(e, n.BinOp):
        return _BIN_PREC[e.op]
    if isinstance(e, n.UnaryOp):
        return _UNARY_MINUS if e.op == "-" else 3
    if isinstance(e, n.Compare):
        return 4
    if isinstance(e, n.BoolOp):
        return 2 if e.op == "and" else 1
    if isinstance(e, n.Unsupported):
        return 0
    return _ATOM


def _wrap(e: n.Expr, needs: bool) -> str:
    text = _expr(e)
    return f"({text})" if needs else text


def _expr(e: n.Expr) -> str:
    if isinstance(e, n.Name):
        return e.id
    if isinstance(e, n.IntLit):
        return str(e.value)
    if isinstance(e, n.FloatLit):
        return _float(e.value)
    if isinstance(e, n.StrLit):
        return json.dumps(e.value, ensure_ascii=False)
    if isinstance(e, n.BoolLit):
        return "True" if e.value else "False"
    if isinstance(e, n.NoneLit):
        return "None"
    if isinstance(e, n.ListLit):
        return "[" + ", ".join(_expr(x) for x in e.elts) + "]"
    if isinstance(e, n.TupleLit):
        if len(e.elts) == 1:
            return "(" + _expr(e.elts[0]) + ",)"
        return "(" + ", ".join(_expr(x) for x in e.elts) + ")"
    if isinstance(e, n.MapLit):
        items = ", ".join(f"{_expr(k)}: {_expr(v)}" for k, v in zip(e.keys, e.values))
        return "{" + items + "}"
    if isinstance(e, n.Attribute):
        # "1.x" would lex as a float followed by a name
        bare_int = isinstance(e.value, n.IntLit)
        return f"{_wrap(e.value, bare_int or _prec(e.value) < _ATOM)}.{e.attr}"
    if isinstance(e, n.Subscript):
        return f"{_wrap(e.value, _prec(e.value) < _ATOM)}[{_expr(e.index)}]"
    if isinstance(e, n.Call):
        args = ", ".join(_expr(a) for a in e.args)
        return f"{_wrap(e.func, _prec(e.func) < _ATOM)}({args})"
    if isinstance(e, n.BinOp):
        p = _BIN_PREC[e.op]
        if e.op == "**":
            left = _wrap(e.left, _prec(e.left) <= p)
            right = _wrap(e.right, _prec(e.right) < _UNARY_MINUS)
        else:
            left = _wrap(e.left, _prec(e.left) < p)
            right = _wrap(e.right, _prec(e.right) <= p)
        return f"{left} {e.op} {right}"
    if isinstance(e, n.UnaryOp):
        if e.op == "-":
            return "-" + _wrap(e.operand, _prec(e.operand) < _UNARY_MINUS)
        return "not " + _wrap(e.operand, _prec(e.operand) < 3)
    if isinstance(e, n.Compare):
        parts = [_wrap(e.left, _prec(e.left) <= 4)]
        for op, comp in zip(e.ops, e.comparators):
            parts.append(op)
            parts.append(_wrap(comp, _prec(comp) <= 4))
        return " ".join(parts)
    if isinstance(e, n.BoolOp):
        p = _prec(e)
        return f" {e.op} ".join(_wrap(v, _prec(v) <= p) for v in e.values)
    if isinstance(e, n.Unsupported):
        return e.text
    raise TypeError(f"cannot emit expression {type(e).__name__}")


def _float(value: float) -> str:
    if math.isinf(value):
        return "1e999" if value > 0 else "-1e999"
    if math.isnan(value):
        raise ValueError("NaN has no literal form")
    return repr(value)
