from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from faasforge.bench import (
    REFERENCE_DEPLOYED, REFERENCE_LOCAL, OverheadInputs, ReportRow, expected_calls, fib, invocation_program,
    limit_overhead, overhead, render_report, replay, run_experiment,
)

from helpers import fib_memo, load


def exact_overhead(t_orig, t_target, fixed, calls) -> Fraction:
    """Independent oracle: the same model in exact rational arithmetic."""
    o, t, f = (Fraction(str(v)) for v in (t_orig, t_target, fixed))
    return (t + f / calls) / o - 1


def test_overhead_of_identical_times_without_fixed_cost_is_zero():
    assert overhead(OverheadInputs(2.0, 2.0, 0.0, 5)) == 0.0


@given(st.floats(1e-3, 1e4), st.floats(0, 1e6), st.floats(0, 1e5), st.integers(1, 10 ** 9))
def test_overhead_matches_exact_oracle(t_orig, t_target, fixed, calls):
    got = overhead(OverheadInputs(t_orig, t_target, fixed, calls))
    want = float(exact_overhead(t_orig, t_target, fixed, calls))
    assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-9)


@pytest.mark.parametrize("kwargs", [
    {"t_orig": 0.0}, {"t_orig": -1.0}, {"calls": 0}, {"fixed_cost": -1.0},
])
def test_invalid_inputs(kwargs):
    base = {"t_orig": 1.0, "t_target": 1.0, "fixed_cost": 0.0, "calls": 1}
    base.update(kwargs)
    with pytest.raises(ValueError):
        OverheadInputs(**base)


@pytest.mark.parametrize("x", [1, 2, 10, 15, 18, 20, 30, 40, 60])
def test_expected_calls_matches_memo_oracle(x):
    assert fib(x) == fib_memo(x)
    assert expected_calls(x) == 2 * fib_memo(x) - 1


def test_expected_calls_range():
    for bad in (0, 61):
        with pytest.raises(ValueError):
            expected_calls(bad)


def test_reference_call_counts_follow_recursion():
    for row in REFERENCE_LOCAL + REFERENCE_DEPLOYED:
        x = int(row.label.split("(")[1].rstrip(")"))
        assert row.calls == expected_calls(x), row.label


def test_replay_reproduces_consistent_rows():
    for row, reproduced in zip([r for r in REFERENCE_LOCAL + REFERENCE_DEPLOYED if r.consistent],
                               replay(REFERENCE_LOCAL) + replay(REFERENCE_DEPLOYED)):
        assert reproduced.label == row.label
        assert abs(reproduced.overhead - row.listed_overhead) <= 0.01, row.label
        assert math.isclose(reproduced.overhead,
                            float(exact_overhead(row.t_orig, row.t_target, row.fixed_cost, row.calls)))


def test_inconsistent_row_is_flagged_not_hidden():
    rows = replay(REFERENCE_LOCAL, include_inconsistent=True)
    flagged = [r for r in rows if r.note]
    assert [r.label for r in flagged] == ["fib(10)"]
    assert abs(flagged[0].overhead - 94.78) < 0.01


def test_limit_overhead_is_ratio_minus_one():
    assert limit_overhead(2.0, 6.0) == 2.0


def test_invocation_program_replaces_main_guard():
    subject = invocation_program(load("fib"), "fib(5)")
    assert subject.text.rstrip().endswith('if __name__ == "__main__":\n    fib(5)')
    with pytest.raises(ValueError):
        invocation_program(load("fib"), "5 + 5")


def test_render_text_and_csv():
    rows = [ReportRow.from_inputs("fib(5)", OverheadInputs(1.0, 3.0, 9.0, 9)),
            ReportRow.failure("fib(9)", "local", "boom")]
    text = render_report(rows)
    lines = text.splitlines()
    assert lines[0].split() == ["Invocation", "Calls", "Original", "ms", "Target", "ms", "Overhead"]
    assert lines[2].split()[-1] == "3.00"
    assert lines[3].split()[-1] == "failed"
    csv_text = render_report(rows, "csv")
    assert csv_text.splitlines()[0] == "label,calls,t_orig_ms,t_target_ms,overhead"
    assert csv_text.splitlines()[1] == "fib(5),9,1.0000,3.0000,3.00"
    with pytest.raises(ValueError):
        render_report(rows, "xml")


def test_direct_experiment_has_zero_overhead():
    row = run_experiment(load("fib"), "fib(8)", "direct", repetitions=1)
    assert row.calls == expected_calls(8)
    assert row.overhead == 0.0


def test_local_experiment_counts_and_positive_overhead():
    row = run_experiment(load("fib"), "fib(12)", "local", repetitions=1)
    assert not row.failed
    assert row.calls == expected_calls(12)
    assert row.overhead > 0


def test_emulated_experiment_includes_deploy_cost(gateway):
    row = run_experiment(load("fib"), "fib(8)", "emulated", gateway.url, repetitions=1)
    assert not row.failed and row.fixed_cost > 0


def test_failed_run_reports_failure_row():
    row = run_experiment(load("greet"), "ask_name()", "local", repetitions=1)
    assert row.failed and "EOFError" in row.note
