from __future__ import annotations

import math
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faasforge.interpreter import (
    BudgetExceeded, FunctionInstance, Limits, RuntimeFault, backend, roundtrip, run_handler, run_module,
)
from faasforge.syntax import SourceModule

from helpers import PROGRAMS, fib_memo, run_cpython, run_direct


@pytest.fixture(params=sorted(backend.available_backends()))
def core(request, monkeypatch):
    monkeypatch.setattr(backend, "Evaluator", backend.available_backends()[request.param].Evaluator)
    return request.param


def run(text: str, stdin=(), limits=None):
    return run_module(SourceModule.from_text("m", text), stdin, limits)


def main(*lines: str) -> str:
    return "if __name__ == \"__main__\":\n" + "".join(f"    {line}\n" for line in lines)


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_corpus_stdout_matches_host_python(name, core):
    assert run_direct(name).stdout == run_cpython(name)


def test_fib_value_and_call_count(core):
    result = run_direct("fib")
    assert result.stdout == f"{fib_memo(10)}\n"
    # main -> fib(10) makes 2*fib(10)-1 interpreted calls
    assert result.call_count == 2 * fib_memo(10) - 1


def test_last_expression_is_return_value(core):
    assert run_direct("counter").return_value == 2
    assert run(main("1 + 1", "x = 5")).return_value == 2
    assert run("").return_value is None


def test_globals_and_augmented_assignment(core):
    text = "n = 0\n\ndef bump(k):\n    global n\n    n += k\n    return n\n\n" + main("bump(2)", "print(bump(3))")
    assert run(text).stdout == "5\n"


def test_input_consumes_stdin(core):
    text = main("a = input('a? ')", "b = input()", "print(a + b)")
    assert run(text, ["x", "y"]).stdout == "a? xy\n"
    with pytest.raises(RuntimeFault) as info:
        run(text, ["x"])
    assert info.value.kind == "EOFError"
    assert info.value.stdout == "a? "


@pytest.mark.parametrize("expr,kind", [
    ("1 / 0", "ZeroDivisionError"),
    ("[1][3]", "IndexError"),
    ("{'a': 1}['b']", "KeyError"),
    ("undefined_name", "NameError"),
    ("1 + 'a'", "TypeError"),
])
def test_faults_carry_kind(expr, kind, core):
    with pytest.raises(RuntimeFault) as info:
        run(main(expr))
    assert info.value.kind == kind


def test_step_budget(core):
    with pytest.raises(BudgetExceeded):
        run(main("i = 0", "while True:", "    i += 1"), limits=Limits(max_steps=10_000))


def test_wall_budget(core):
    start = time.monotonic()
    with pytest.raises(BudgetExceeded):
        run(main("while True:", "    pass"), limits=Limits(wall_seconds=0.2))
    assert time.monotonic() - start < 1.0


def test_system_math_module(core):
    out = run("import math\n\n" + main("print(math.sin(1.0))", "print(math.floor(2.5))")).stdout
    assert out == f"{math.sin(1.0)}\n2\n"


def test_instance_runs_top_level_once():
    source = "calls = 0\n\ndef lambda_handler(event, context):\n    global calls\n    calls += 1\n" \
             "    return {\"calls\": calls}\n"
    inst = FunctionInstance("u", source)
    assert run_handler(inst, {})["calls"] == 1
    assert run_handler(inst, {})["calls"] == 2
    assert inst.invocations == 2


def test_handler_timeout_payload():
    source = "def lambda_handler(event, context):\n    while True:\n        pass\n"
    inst = FunctionInstance("spin", source)
    start = time.monotonic()
    response = run_handler(inst, {}, timeout_s=0.3)
    assert response["error"]["type"] == "Timeout"
    assert time.monotonic() - start < 0.5


def test_handler_fault_payload():
    inst = FunctionInstance("bad", "def lambda_handler(event, context):\n    return 1 / 0\n")
    assert run_handler(inst, {})["error"]["type"] == "Runtime"
    inst = FunctionInstance("odd", "def lambda_handler(event, context):\n    return 3\n")
    assert run_handler(inst, {})["error"]["type"] == "Runtime"


def test_missing_handler_rejected():
    with pytest.raises(RuntimeFault):
        FunctionInstance("u", "def handler(event):\n    return 1\n")


# -- JSON boundary -----------------------------------------------------------------

json_values = st.recursive(
    st.one_of(st.none(), st.booleans(), st.integers(-2 ** 63, 2 ** 63),
              st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=8)),
    lambda inner: st.one_of(st.lists(inner, max_size=4), st.dictionaries(st.text(max_size=4), inner, max_size=4)),
    max_leaves=10,
)


@settings(max_examples=200, deadline=None)
@given(json_values)
def test_roundtrip_fixed_point(value):
    once = roundtrip(value)
    assert roundtrip(once) == once
    assert once == value


def test_tuples_become_lists():
    assert roundtrip((1, (2, 3))) == [1, [2, 3]]


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), {1: 2}])
def test_unrepresentable_values_fault(bad):
    with pytest.raises(RuntimeFault):
        roundtrip(bad)


# -- arithmetic against the host ---------------------------------------------------

small = st.integers(-50, 50)


@settings(max_examples=150, deadline=None)
@given(small, small, st.sampled_from(["+", "-", "*", "//", "%", "<", "==", ">="]))
def test_binary_ops_match_host(a, b, op):
    if op in ("//", "%") and b == 0:
        return
    expr = f"({a}) {op} ({b})"
    assert run(main(f"print({expr})")).stdout == f"{eval(expr)}\n"
