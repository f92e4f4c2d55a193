from __future__ import annotations

import ast

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faasforge.syntax import (
    LexError, ParseError, SourceModule, check_subset, emit, emit_expr, nodes as n, parse, parse_expression,
)

from helpers import corpus_files

FIB = """def fib(x):
    if x in (1, 2):
        return 1
    return fib(x - 1) + fib(x - 2)
"""


def test_parse_fib_listing():
    tree = parse(FIB)
    assert len(tree.body) == 1
    fn = tree.body[0]
    assert isinstance(fn, n.FunctionDef)
    assert fn.name == "fib" and fn.params == ("x",)
    assert [type(s) for s in fn.body] == [n.If, n.Return]


def test_parse_empty():
    assert parse("") == n.Module(())


def test_parse_assign_then_print_matches_hand_built_tree():
    expected = n.Module((
        n.Assign(n.Name("x"), n.Call(n.Name("fib"), (n.IntLit(10),))),
        n.ExprStmt(n.Call(n.Name("print"), (n.Name("x"),))),
    ))
    assert parse("x = fib(10)\nprint(x)") == expected


def test_spans_point_into_source():
    text = "x = 1\ny = fib(x)\n"
    call = parse(text).body[1].value
    assert (call.span.line, call.span.column) == (2, 5)
    assert text[call.span.offset:call.span.offset + call.span.length] == "fib(x)"


def test_emit_main_guard_line():
    tree = n.Module((n.MainGuard((n.ExprStmt(n.Call(n.Name("print"), (n.StrLit("hi"),))),)),))
    assert 'if __name__ == "__main__":\n    print("hi")\n' in emit(tree)


def test_emit_two_functions_golden():
    tree = parse("def a():\n  return 1\ndef b(x, y):\n      return x+y*2\n")
    assert emit(tree) == "def a():\n    return 1\n\ndef b(x, y):\n    return x + y * 2\n"


def test_emit_parenthesizes_by_precedence():
    for src in ["(a + b) * c", "a - (b - c)", "-(a ** b)", "(-a) ** b", "a ** (b ** c)", "(a ** b) ** c",
                "not (a and b)", "(a or b) and c", "(a < b) == c", "[1, (2,), ()]"]:
        expr = parse_expression(src)
        assert parse_expression(emit_expr(expr)) == expr, src
        assert ast.dump(ast.parse(emit_expr(expr), mode="eval")) == ast.dump(ast.parse(src, mode="eval"))


def test_emit_is_deterministic():
    tree = parse(FIB)
    assert emit(tree) == emit(parse(FIB))


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    tree = parse(path.read_text())
    once = emit(tree)
    assert parse(once) == tree
    assert emit(parse(once)) == once


def test_check_subset_clean_on_fib():
    assert check_subset(parse(FIB)) == []


@pytest.mark.parametrize("src,construct", [
    ("def h():\n    return lambda x: x\n", "anonymous function"),
    ("def h():\n    print(1, end='')\n", "keyword argument"),
    ("@dec\ndef f():\n    pass\n", "decorator"),
    ("def f(x=1):\n    return x\n", "default argument"),
    ("def h(xs):\n    return [i for i in xs]\n", "comprehension"),
    ("class A(B):\n    pass\n", "inheritance"),
    ("def g():\n    yield 1\n", "generator"),
])
def test_check_subset_reports_construct(src, construct):
    found = check_subset(parse(src))
    assert [v.construct for v in found] == [construct]
    v = found[0]
    assert 0 <= v.span.offset < len(src) and v.span.offset + v.span.length <= len(src)


def test_violations_sorted_by_position():
    src = "def f():\n    return lambda: 1\n\ndef g():\n    print(1, sep='')\n"
    found = check_subset(parse(src))
    assert [v.construct for v in found] == ["anonymous function", "keyword argument"]
    assert found[0].span.offset < found[1].span.offset


def test_tab_indent_is_lex_error():
    with pytest.raises(LexError) as info:
        parse("def f():\n\treturn 1\n")
    assert info.value.span.line == 2


def test_bad_character_is_lex_error():
    with pytest.raises(LexError):
        parse("x = 1 $ 2\n")


def test_unexpected_token_is_parse_error():
    with pytest.raises(ParseError) as info:
        parse("def f(:\n    pass\n")
    assert info.value.span.line == 1


def test_source_module_name_strips_suffix(tmp_path):
    p = tmp_path / "fib.py"
    p.write_text(FIB)
    mod = SourceModule.from_path(p)
    assert mod.name == "fib"
    with pytest.raises(ValueError):
        SourceModule.from_text("1bad", "")


# -- generated expression trees --------------------------------------------------------

_names = st.sampled_from(["a", "b", "x", "y_1"])
_leaf = st.one_of(
    st.integers(0, 10 ** 6).map(n.IntLit),
    st.floats(0, 1e6, allow_nan=False).map(n.FloatLit),
    st.text(max_size=5).map(n.StrLit),
    st.booleans().map(n.BoolLit),
    st.just(n.NoneLit()),
    _names.map(n.Name),
)


def _compound(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*", "/", "//", "%", "**"]), children)
        .map(lambda t: n.BinOp(*t)),
        st.tuples(st.sampled_from(["-", "not"]), children).map(lambda t: n.UnaryOp(*t)),
        st.tuples(children, st.sampled_from(["==", "!=", "<", "<=", ">", ">=", "in"]), children)
        .map(lambda t: n.Compare(t[0], (t[1],), (t[2],))),
        st.tuples(st.sampled_from(["and", "or"]), st.lists(children, min_size=2, max_size=3))
        .map(lambda t: n.BoolOp(t[0], tuple(t[1]))),
        st.lists(children, max_size=3).map(lambda xs: n.ListLit(tuple(xs))),
        st.lists(children, max_size=3).map(lambda xs: n.TupleLit(tuple(xs))),
        st.tuples(_names, st.lists(children, max_size=3)).map(lambda t: n.Call(n.Name(t[0]), tuple(t[1]))),
        st.tuples(children, children).map(lambda t: n.Subscript(*t)),
        st.tuples(children, _names).map(lambda t: n.Attribute(*t)),
    )


expressions = st.recursive(_leaf, _compound, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(expressions)
def test_generated_expressions_round_trip(expr):
    text = emit_expr(expr)
    assert parse_expression(text) == expr
    # the host parser reads the emitted text with the same structure
    assert ast.dump(ast.parse(text, mode="eval")) == ast.dump(ast.parse(emit_expr(parse_expression(text)), mode="eval"))
