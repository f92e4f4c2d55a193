"""Recursive-descent parser producing :mod:`faasforge.syntax.nodes` trees.

Constructs that belong to the full language but not to the subset are
parsed anyway and wrapped in :class:`~faasforge.syntax.nodes.Unsupported`
so that :func:`check_subset` can report all of them with spans.
"""
from __future__ import annotations

import ast as _pyast
import keyword
from typing import List, Optional, Tuple

from . import nodes as n
from .lexer import (
    DEDENT, EOF, INDENT, NAME, NEWLINE, NUMBER, OP, STRING,
    SyntaxFault, Token, tokenize,
)


class ParseError(SyntaxFault):
    pass


_AUG_OPS = {"+=", "-=", "*=", "/=", "//=", "%=", "**="}
_UNSUPPORTED_AUG = {"&=", "|=", "^=", "<<=", ">>=", "@="}
_COMPARE_OPS = {"==", "!=", "<", "<=", ">", ">="}
_SIMPLE_UNSUPPORTED = {
    "break": "loop control",
    "continue": "loop control",
    "del": "del statement",
    "assert": "assert statement",
    "raise": "exception handling",
    "nonlocal": "nonlocal declaration",
    "yield": "generator",
}
_COMPOUND_UNSUPPORTED = {
    "try": "exception handling",
    "with": "context manager",
    "async": "coroutine",
    "match": None,  # soft keyword; only unsupported when used as a statement
}
_KEYWORDS = set(keyword.kwlist)


def parse(text: str) -> n.Module:
    """Parse source text into a Module tree."""
    return _Parser(text).parse_module()


def parse_expression(text: str) -> n.Expr:
    """Parse a single expression, e.g. an invocation label like ``fib(20)``."""
    p = _Parser(text)
    expr = p.test()
    while p.at(NEWLINE):
        p.advance()
    p.expect_kind(EOF)
    return expr


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == OP and self.tok.text in ops

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == NAME and self.tok.text in words

    def accept_op(self, op: str) -> Optional[Token]:
        if self.at_op(op):
            return self.advance()
        return None

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            self.error(f"expected {op!r}")
        return self.advance()

    def expect_kind(self, kind: str) -> Token:
        if not self.at(kind):
            self.error(f"expected {kind}")
        return self.advance()

    def expect_name(self) -> Token:
        t = self.tok
        if t.kind != NAME or t.text in _KEYWORDS:
            self.error("expected identifier")
        return self.advance()

    def error(self, message: str):
        t = self.tok
        shown = t.text or t.kind
        raise ParseError(f"{message}, found {shown!r}", t.span)

    def span_from(self, start: Token) -> n.Span:
        i = self.pos - 1
        while i > 0 and self.tokens[i].kind in (NEWLINE, INDENT, DEDENT):
            i -= 1
        prev = self.tokens[i] if i >= 0 else start
        end = max(prev.end, start.end)
        return n.Span(start.line, start.column, end - start.offset, start.offset)

    def source(self, start: Token) -> str:
        return self.text[start.offset : self.span_from(start).offset + self.span_from(start).length]

    def unsupported(self, construct: str, start: Token, *children: n.Node) -> n.Unsupported:
        return n.Unsupported(construct, self.source(start), tuple(children), self.span_from(start))

    # -- statements ----------------------------------------------------------

    def parse_module(self) -> n.Module:
        body: List[n.Stmt] = []
        start = self.tok
        while not self.at(EOF):
            if self.at(NEWLINE):
                self.advance()
                continue
            body.extend(self.statement(top_level=True))
        return n.Module(tuple(body), self.span_from(start))

    def block(self) -> Tuple[n.Stmt, ...]:
        self.expect_op(":")
        if not self.at(NEWLINE):
            return tuple(self.simple_line())
        self.advance()
        if not self.at(INDENT):
            self.error("expected an indented block")
        self.advance()
        body: List[n.Stmt] = []
        while not self.at(DEDENT) and not self.at(EOF):
            if self.at(NEWLINE):
                self.advance()
                continue
            body.extend(self.statement())
        self.accept_kind(DEDENT)
        return tuple(body)

    def accept_kind(self, kind: str) -> Optional[Token]:
        if self.at(kind):
            return self.advance()
        return None

    def statement(self, top_level: bool = False) -> List[n.Stmt]:
        t = self.tok
        if t.kind == OP and t.text == "@":
            return [self.decorated(top_level)]
        if t.kind == NAME:
            word = t.text
            if word == "def":
                return [self.funcdef()]
            if word == "class":
                return [self.classdef()]
            if word == "if":
                return [self.if_stmt(top_level)]
            if word == "while":
                return [self.while_stmt()]
            if word == "for":
                return [self.for_stmt()]
            if word in _COMPOUND_UNSUPPORTED and self._is_compound_unsupported():
                return [self.skip_compound(_COMPOUND_UNSUPPORTED[word] or "pattern matching")]
        return self.simple_line()

    def _is_compound_unsupported(self) -> bool:
        word = self.tok.text
        if word == "match":
            nxt = self.peek()
            return nxt.kind in (NAME, NUMBER, STRING) or (nxt.kind == OP and nxt.text in "([{")
        return True

    def skip_compound(self, construct: str) -> n.Stmt:
        start = self.tok
        while True:
            while not self.at(NEWLINE) and not self.at(EOF):
                self.advance()
            self.accept_kind(NEWLINE)
            if self.at(INDENT):
                depth = 0
                while not self.at(EOF):
                    t = self.advance()
                    if t.kind == INDENT:
                        depth += 1
                    elif t.kind == DEDENT:
                        depth -= 1
                        if depth == 0:
                            break
            if not self.at_kw("except", "else", "finally"):
                break
        end = self.tokens[self.pos - 1].end
        text = self.text[start.offset:end].rstrip()
        return n.Unsupported(construct, text, (), n.Span(start.line, start.column, len(text), start.offset))

    def simple_line(self) -> List[n.Stmt]:
        stmts = [self.simple_stmt()]
        while self.accept_op(";"):
            if self.at(NEWLINE) or self.at(EOF):
                break
            stmts.append(self.simple_stmt())
        if not self.at(EOF):
            self.expect_kind(NEWLINE)
        return stmts

    def simple_stmt(self) -> n.Stmt:
        start = self.tok
        if start.kind == NAME:
            word = start.text
            if word == "pass":
                self.advance()
                return n.Pass(self.span_from(start))
            if word == "return":
                self.advance()
                value = None
                if not self.at(NEWLINE) and not self.at_op(";") and not self.at(EOF):
                    value = self.testlist()
                return n.Return(value, self.span_from(start))
            if word == "global":
                self.advance()
                names = [self.expect_name().text]
                while self.accept_op(","):
                    names.append(self.expect_name().text)
                return n.GlobalDecl(tuple(names), self.span_from(start))
            if word == "import":
                return self.import_stmt()
            if word == "from":
                self.skip_line()
                return self.unsupported("from-import", start)
            if word in _SIMPLE_UNSUPPORTED:
                self.skip_line()
                return self.unsupported(_SIMPLE_UNSUPPORTED[word], start)

        target = self.testlist(allow_star=True)
        if self.at_op("="):
            targets = [target]
            while self.accept_op("="):
                targets.append(self.testlist(allow_star=True))
            value = targets.pop()
            if len(targets) > 1:
                return self.unsupported("chained assignment", start, *targets, value)
            tgt = targets[0]
            if isinstance(tgt, n.TupleLit):
                return self.unsupported("tuple unpacking", start, tgt, value)
            if not isinstance(tgt, (n.Name, n.Attribute, n.Subscript, n.Unsupported)):
                raise ParseError("cannot assign to expression", start.span)
            return n.Assign(tgt, value, self.span_from(start))
        if self.at(OP) and self.tok.text in _AUG_OPS:
            op = self.advance().text[:-1]
            value = self.testlist()
            if not isinstance(target, (n.Name, n.Attribute, n.Subscript)):
                raise ParseError("illegal target for augmented assignment", start.span)
            return n.AugAssign(target, op, value, self.span_from(start))
        if self.at(OP) and self.tok.text in _UNSUPPORTED_AUG:
            self.advance()
            value = self.testlist()
            return self.unsupported("bitwise operator", start, target, value)
        if self.at_op(":"):
            self.advance()
            self.test()
            if self.accept_op("="):
                self.testlist()
            return self.unsupported("annotation", start, target)
        return n.ExprStmt(target, self.span_from(start))

    def skip_line(self):
        while not self.at(NEWLINE) and not self.at(EOF) and not self.at_op(";"):
            self.advance()

    def import_stmt(self) -> n.Stmt:
        start = self.advance()
        names = []
        aliased = False
        while True:
            parts = [self.expect_name().text]
            while self.accept_op("."):
                parts.append(self.expect_name().text)
            if self.at_kw("as"):
                self.advance()
                self.expect_name()
                aliased = True
            names.append(".".join(parts))
            if not self.accept_op(","):
                break
        node = n.Import(tuple(names), self.span_from(start))
        if aliased:
            return self.unsupported("import alias", start, node)
        if any("." in name for name in names):
            return self.unsupported("dotted import", start, node)
        return node

    def decorated(self, top_level: bool) -> n.Stmt:
        start = self.tok
        while self.accept_op("@"):
            self.test()
            self.expect_kind(NEWLINE)
        if self.at_kw("def"):
            inner = self.funcdef()
        elif self.at_kw("class"):
            inner = self.classdef()
        else:
            self.error("expected def or class after decorator")
        return n.Unsupported("decorator", self.source(start), (inner,), self.span_from(start))

    def funcdef(self) -> n.Stmt:
        start = self.advance()
        name = self.expect_name().text
        self.expect_op("(")
        params: List[str] = []
        problems: List[str] = []
        while not self.at_op(")"):
            if self.at_op("*", "**"):
                self.advance()
                problems.append("star argument")
                if self.at(NAME):
                    self.advance()
            elif self.at_op("/"):
                self.advance()
                problems.append("positional-only marker")
            else:
                params.append(self.expect_name().text)
                if self.accept_op(":"):
                    self.test()
                    problems.append("annotation")
                if self.accept_op("="):
                    self.test()
                    problems.append("default argument")
            if not self.accept_op(","):
                break
        self.expect_op(")")
        if self.accept_op("->"):
            self.test()
            problems.append("annotation")
        body = self.block()
        node = n.FunctionDef(name, tuple(params), body, self.span_from(start))
        if len(set(params)) != len(params):
            raise ParseError("duplicate parameter name", start.span)
        for construct in problems:
            node = n.Unsupported(construct, self.source(start), (node,), node.span)
        return node

    def classdef(self) -> n.Stmt:
        start = self.advance()
        name = self.expect_name().text
        bases = []
        if self.accept_op("("):
            while not self.at_op(")"):
                bases.append(self.test())
                if not self.accept_op(","):
                    break
            self.expect_op(")")
        body = self.block()
        node = n.ClassDef(name, body, self.span_from(start))
        if bases:
            node = n.Unsupported("inheritance", self.source(start), (node,), node.span)
        return node

    def if_stmt(self, top_level: bool) -> n.Stmt:
        start = self.advance()
        test = self.test()
        body = self.block()
        branches = [(test, body)]
        orelse: Tuple[n.Stmt, ...] = ()
        while self.at_kw("elif"):
            self.advance()
            t = self.test()
            branches.append((t, self.block()))
        if self.at_kw("else"):
            self.advance()
            orelse = self.block()
        if top_level and len(branches) == 1 and not orelse and _is_main_test(test):
            return n.MainGuard(body, self.span_from(start))
        return n.If(tuple(branches), orelse, self.span_from(start))

    def while_stmt(self) -> n.Stmt:
        start = self.advance()
        test = self.test()
        body = self.block()
        node = n.While(test, body, self.span_from(start))
        if self.at_kw("else"):
            self.advance()
            orelse = self.block()
            return self.unsupported("loop else", start, node, *orelse)
        return node

    def for_stmt(self) -> n.Stmt:
        start = self.advance()
        target = self.exprlist()
        if not self.at_kw("in"):
            self.error("expected 'in'")
        self.advance()
        iterable = self.testlist()
        body = self.block()
        orelse: Tuple[n.Stmt, ...] = ()
        if self.at_kw("else"):
            self.advance()
            orelse = self.block()
        if (
            isinstance(target, n.Name)
            and isinstance(iterable, n.Call)
            and isinstance(iterable.func, n.Name)
            and iterable.func.id == "range"
            and 1 <= len(iterable.args) <= 3
        ):
            node = n.ForRange(target.id, iterable.args, body, self.span_from(start))
            if orelse:
                return self.unsupported("loop else", start, node, *orelse)
            return node
        return self.unsupported("non-range for loop", start, target, iterable, *body, *orelse)

    # -- expressions ---------------------------------------------------------

    def testlist(self, allow_star: bool = False) -> n.Expr:
        start = self.tok
        first = self.test_or_star() if allow_star else self.test()
        if not self.at_op(","):
            return first
        elts = [first]
        while self.accept_op(","):
            if self._at_expr_end():
                break
            elts.append(self.test_or_star() if allow_star else self.test())
        return n.TupleLit(tuple(elts), self.span_from(start))

    def test_or_star(self) -> n.Expr:
        if self.at_op("*"):
            start = self.advance()
            inner = self.expr()
            return self.unsupported("star argument", start, inner)
        return self.test()

    def exprlist(self) -> n.Expr:
        start = self.tok
        first = self.expr()
        if not self.at_op(","):
            return first
        elts = [first]
        while self.accept_op(","):
            if self.at_kw("in"):
                break
            elts.append(self.expr())
        return n.TupleLit(tuple(elts), self.span_from(start))

    def _at_expr_end(self) -> bool:
        t = self.tok
        return t.kind in (NEWLINE, EOF) or (t.kind == OP and t.text in (")", "]", "}", "=", ";", ":"))

    def test(self) -> n.Expr:
        start = self.tok
        if self.at_kw("lambda"):
            self.advance()
            while not self.at_op(":"):
                if self.at(EOF) or self.at(NEWLINE):
                    self.error("expected ':'")
                self.advance()
            self.advance()
            body = self.test()
            return self.unsupported("anonymous function", start, body)
        if self.at_kw("yield"):
            self.advance()
            children = () if self._at_expr_end() else (self.testlist(),)
            return self.unsupported("generator", start, *children)
        if self.at_kw("await"):
            self.advance()
            return self.unsupported("coroutine", start, self.test())
        node = self.or_test()
        if self.at_kw("if"):
            self.advance()
            cond = self.or_test()
            if not self.at_kw("else"):
                self.error("expected 'else'")
            self.advance()
            other = self.test()
            return self.unsupported("conditional expression", start, node, cond, other)
        if self.at_op(":="):
            self.advance()
            value = self.test()
            return self.unsupported("assignment expression", start, node, value)
        return node

    def or_test(self) -> n.Expr:
        start = self.tok
        node = self.and_test()
        if not self.at_kw("or"):
            return node
        values = [node]
        while self.at_kw("or"):
            self.advance()
            values.append(self.and_test())
        return n.BoolOp("or", tuple(values), self.span_from(start))

    def and_test(self) -> n.Expr:
        start = self.tok
        node = self.not_test()
        if not self.at_kw("and"):
            return node
        values = [node]
        while self.at_kw("and"):
            self.advance()
            values.append(self.not_test())
        return n.BoolOp("and", tuple(values), self.span_from(start))

    def not_test(self) -> n.Expr:
        if self.at_kw("not"):
            start = self.advance()
            operand = self.not_test()
            return n.UnaryOp("not", operand, self.span_from(start))
        return self.comparison()

    def comparison(self) -> n.Expr:
        start = self.tok
        left = self.expr()
        ops: List[str] = []
        comparators: List[n.Expr] = []
        problem = None
        while True:
            if self.at(OP) and self.tok.text in _COMPARE_OPS:
                ops.append(self.advance().text)
            elif self.at_kw("in"):
                self.advance()
                ops.append("in")
            elif self.at_kw("not") and self.peek().kind == NAME and self.peek().text == "in":
                self.advance()
                self.advance()
                ops.append("in")
                problem = "negated membership"
            elif self.at_kw("is"):
                self.advance()
                if self.at_kw("not"):
                    self.advance()
                ops.append("==")
                problem = "identity comparison"
            elif self.at_op("<>"):
                self.error("invalid comparison operator")
            else:
                break
            comparators.append(self.expr())
        if not ops:
            return left
        node = n.Compare(left, tuple(ops), tuple(comparators), self.span_from(start))
        if problem:
            return self.unsupported(problem, start, left, *comparators)
        return node

    def expr(self) -> n.Expr:
        start = self.tok
        node = self.arith()
        children = [node]
        while self.at_op("|", "^", "&", "<<", ">>"):
            self.advance()
            children.append(self.arith())
        if len(children) > 1:
            return self.unsupported("bitwise operator", start, *children)
        return node

    def arith(self) -> n.Expr:
        start = self.tok
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            right = self.term()
            node = n.BinOp(node, op, right, self.span_from(start))
        return node

    def term(self) -> n.Expr:
        start = self.tok
        node = self.factor()
        while self.at_op("*", "/", "//", "%", "@"):
            op = self.advance().text
            right = self.factor()
            if op == "@":
                node = self.unsupported("matrix multiplication", start, node, right)
            else:
                node = n.BinOp(node, op, right, self.span_from(start))
        return node

    def factor(self) -> n.Expr:
        start = self.tok
        if self.at_op("-"):
            self.advance()
            operand = self.factor()
            return n.UnaryOp("-", operand, self.span_from(start))
        if self.at_op("+"):
            self.advance()
            operand = self.factor()
            return self.unsupported("unary plus", start, operand)
        if self.at_op("~"):
            self.advance()
            operand = self.factor()
            return self.unsupported("bitwise operator", start, operand)
        return self.power()

    def power(self) -> n.Expr:
        start = self.tok
        node = self.atom_expr()
        if self.at_op("**"):
            self.advance()
            right = self.factor()
            node = n.BinOp(node, "**", right, self.span_from(start))
        return node

    def atom_expr(self) -> n.Expr:
        start = self.tok
        node = self.atom()
        while True:
            if self.at_op("("):
                node = self.call_trailer(node, start)
            elif self.at_op("["):
                self.advance()
                index = self.subscript_index()
                self.expect_op("]")
                if isinstance(index, n.Unsupported) and index.construct == "slice":
                    node = self.unsupported("slice", start, node, *index.children)
                else:
                    node = n.Subscript(node, index, self.span_from(start))
            elif self.at_op("."):
                self.advance()
                attr = self.expect_name().text
                node = n.Attribute(node, attr, self.span_from(start))
            else:
                return node

    def subscript_index(self) -> n.Expr:
        start = self.tok
        parts: List[n.Expr] = []
        is_slice = False
        if not self.at_op(":"):
            parts.append(self.test())
        while self.at_op(":"):
            self.advance()
            is_slice = True
            if not self.at_op(":", "]", ","):
                parts.append(self.test())
        if is_slice:
            return self.unsupported("slice", start, *parts)
        if self.at_op(","):
            elts = parts
            while self.accept_op(","):
                if self.at_op("]"):
                    break
                elts.append(self.test())
            return n.TupleLit(tuple(elts), self.span_from(start))
        return parts[0]

    def call_trailer(self, func: n.Expr, start: Token) -> n.Expr:
        self.expect_op("(")
        args: List[n.Expr] = []
        problems: List[n.Expr] = []
        while not self.at_op(")"):
            arg_start = self.tok
            if self.at_op("*", "**"):
                self.advance()
                inner = self.test()
                problems.append(self.unsupported("star argument", arg_start, inner))
            elif self.at(NAME) and self.peek().kind == OP and self.peek().text == "=":
                self.advance()
                self.advance()
                value = self.test()
                problems.append(self.unsupported("keyword argument", arg_start, value))
            else:
                arg = self.test()
                if self.at_kw("for"):
                    arg = self.comprehension_tail(arg_start, arg)
                args.append(arg)
            if not self.accept_op(","):
                break
        self.expect_op(")")
        call = n.Call(func, tuple(args) + tuple(problems), self.span_from(start))
        return call

    def comprehension_tail(self, start: Token, element: n.Expr) -> n.Expr:
        children = [element]
        while self.at_kw("for") or self.at_kw("if") or self.at_kw("async"):
            word = self.advance().text
            if word == "async":
                continue
            if word == "for":
                children.append(self.exprlist())
                if not self.at_kw("in"):
                    self.error("expected 'in'")
                self.advance()
                children.append(self.or_test())
            else:
                children.append(self.or_test())
        return self.unsupported("comprehension", start, *children)

    def atom(self) -> n.Expr:
        t = self.tok
        if t.kind == NUMBER:
            self.advance()
            return self.number(t)
        if t.kind == STRING:
            return self.strings()
        if t.kind == NAME:
            if t.text == "True":
                self.advance()
                return n.BoolLit(True, t.span)
            if t.text == "False":
                self.advance()
                return n.BoolLit(False, t.span)
            if t.text == "None":
                self.advance()
                return n.NoneLit(t.span)
            self.expect_name()
            return n.Name(t.text, t.span)
        if t.kind == OP:
            if t.text == "(":
                return self.paren()
            if t.text == "[":
                return self.list_display()
            if t.text == "{":
                return self.brace_display()
            if t.text == "...":
                self.advance()
                return self.unsupported("ellipsis", t)
        self.error("unexpected token")

    def number(self, t: Token) -> n.Expr:
        text = t.text
        if text[-1] in "jJ":
            return n.Unsupported("complex literal", text, (), t.span)
        try:
            value = _pyast.literal_eval(text)
        except (ValueError, SyntaxError):
            raise ParseError(f"invalid number literal {text!r}", t.span) from None
        if isinstance(value, float):
            return n.FloatLit(value, t.span)
        return n.IntLit(value, t.span)

    def strings(self) -> n.Expr:
        start = self.tok
        pieces = []
        problem = None
        while self.at(STRING):
            t = self.advance()
            prefix = t.text[: len(t.text) - len(t.text.lstrip("rRbBuUfF"))].lower()
            if "f" in prefix:
                problem = "formatted string"
                continue
            if "b" in prefix:
                problem = "bytes literal"
                continue
            try:
                pieces.append(_pyast.literal_eval(t.text))
            except (ValueError, SyntaxError):
                raise ParseError("invalid string literal", t.span) from None
        if problem:
            return self.unsupported(problem, start)
        return n.StrLit("".join(pieces), self.span_from(start))

    def paren(self) -> n.Expr:
        start = self.advance()
        if self.accept_op(")"):
            return n.TupleLit((), self.span_from(start))
        if self.at_kw("yield"):
            inner = self.test()
            self.expect_op(")")
            return inner
        first = self.test_or_star()
        if self.at_kw("for"):
            node = self.comprehension_tail(start, first)
            self.expect_op(")")
            return node
        if self.accept_op(")"):
            return first
        elts = [first]
        while self.accept_op(","):
            if self.at_op(")"):
                break
            elts.append(self.test_or_star())
        self.expect_op(")")
        return n.TupleLit(tuple(elts), self.span_from(start))

    def list_display(self) -> n.Expr:
        start = self.advance()
        elts: List[n.Expr] = []
        if not self.at_op("]"):
            first = self.test_or_star()
            if self.at_kw("for"):
                node = self.comprehension_tail(start, first)
                self.expect_op("]")
                return node
            elts.append(first)
            while self.accept_op(","):
                if self.at_op("]"):
                    break
                elts.append(self.test_or_star())
        self.expect_op("]")
        return n.ListLit(tuple(elts), self.span_from(start))

    def brace_display(self) -> n.Expr:
        start = self.advance()
        if self.accept_op("}"):
            return n.MapLit((), (), self.span_from(start))
        keys: List[n.Expr] = []
        values: List[n.Expr] = []
        if self.at_op("**"):
            self.skip_to_close("}")
            return self.unsupported("map unpacking", start)
        first = self.test()
        if not self.at_op(":"):
            items = [first]
            if self.at_kw("for"):
                node = self.comprehension_tail(start, first)
                self.expect_op("}")
                return node
            while self.accept_op(","):
                if self.at_op("}"):
                    break
                items.append(self.test())
            self.expect_op("}")
            return self.unsupported("set literal", start, *items)
        self.advance()
        value = self.test()
        if self.at_kw("for"):
            node = self.comprehension_tail(start, value)
            self.expect_op("}")
            return self.unsupported("comprehension", start, first, node)
        keys.append(first)
        values.append(value)
        while self.accept_op(","):
            if self.at_op("}"):
                break
            keys.append(self.test())
            self.expect_op(":")
            values.append(self.test())
        self.expect_op("}")
        return n.MapLit(tuple(keys), tuple(values), self.span_from(start))

    def skip_to_close(self, close: str):
        depth = 0
        while not self.at(EOF):
            t = self.advance()
            if t.kind == OP and t.text in "([{":
                depth += 1
            elif t.kind == OP and t.text in ")]}":
                if depth == 0:
                    return
                depth -= 1


def _is_main_test(test: n.Expr) -> bool:
    return (
        isinstance(test, n.Compare)
        and test.ops == ("==",)
        and isinstance(test.left, n.Name)
        and test.left.id == "__name__"
        and isinstance(test.comparators[0], n.StrLit)
        and test.comparators[0].value == "__main__"
    )
