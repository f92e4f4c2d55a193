"""End-to-end acceptance checks; each prints one PASS/FAIL line."""
from __future__ import annotations

import contextlib
import random
import time

from faasforge.bench import REFERENCE_DEPLOYED, REFERENCE_LOCAL, OverheadInputs, invocation_program, overhead, \
    run_experiment
from faasforge.interpreter import roundtrip, to_boundary
from faasforge.packager import package_unit, unpack
from faasforge.runtime import HttpClient, HttpDispatcher, LocalDispatcher, execute_program
from faasforge.syntax import SourceModule, emit, parse
from faasforge.transformer import FunctionUnit, TransformOptions, transform_program

from helpers import ACCEPTANCE, CORPUS, PROGRAMS, corpus_files, load, run_direct, run_emulated, run_local, \
    transform


@contextlib.contextmanager
def criterion(number: int, summary: str):
    detail = {"text": summary}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE[number] = (False, detail["text"])
        print(f"criterion {number}: FAIL  {detail['text']}")
        raise
    ACCEPTANCE[number] = (True, detail["text"])
    print(f"criterion {number}: PASS  {detail['text']}")


def local_invocations(program: SourceModule, label: str) -> int:
    result = transform_program(invocation_program(program, label), TransformOptions(paths=(str(CORPUS),)))
    dispatcher = LocalDispatcher(result.units)
    execute_program(result, dispatcher)
    return dispatcher.invocations


def test_criterion_1_call_counts():
    with criterion(1, "fib(20) and fibs(15) handler invocations in local mode") as c:
        start = time.monotonic()
        fib_calls = local_invocations(load("fib"), "fib(20)")
        fibs_calls = local_invocations(load("fibs"), "fibs(15)")
        elapsed = time.monotonic() - start
        c["text"] += f": {fib_calls} and {fibs_calls} in {elapsed:.1f}s"
        assert fib_calls == 13529
        assert fibs_calls == 1219
        assert elapsed < 60


def test_criterion_2_overhead_rows():
    listed = {"fib(1)": 223402.33, "fib(20)": 98.67, "fib(30)": 101.39, "fib(40)": 94.34,
              "fibs(1)": 107147.49, "fibs(10)": 898.94}
    with criterion(2, "overhead model against six listed rows (fib(10) row excluded as inconsistent)") as c:
        rows = {r.label: r for r in REFERENCE_LOCAL + REFERENCE_DEPLOYED}
        worst = 0.0
        for label, want in listed.items():
            r = rows[label]
            got = overhead(OverheadInputs(r.t_orig, r.t_target, r.fixed_cost, r.calls))
            worst = max(worst, abs(got - want))
            assert abs(got - want) <= 0.01, (label, got, want)
        c["text"] += f"; max deviation {worst:.4f}"


def test_criterion_3_semantic_equivalence(gateway):
    with criterion(3, "corpus equivalence across direct, local and emulated modes") as c:
        start = time.monotonic()
        names = sorted(PROGRAMS)
        assert len(names) >= 10
        for name in names:
            direct = run_direct(name)
            local, _ = run_local(name)
            emulated, _ = run_emulated(name, gateway.url)
            assert local.stdout == direct.stdout == emulated.stdout, name
            assert local.return_value == direct.return_value == emulated.return_value, name
        elapsed = time.monotonic() - start
        c["text"] += f": {len(names)} programs in {elapsed:.1f}s"
        assert elapsed < 120


def test_criterion_4_proxy_state():
    with criterion(4, "Counter proxy state after two increments") as c:
        local, _ = run_local("counter")
        direct = run_direct("counter")
        state = to_boundary(local.namespace["c"])
        c["text"] += f": {state}"
        assert state == {"count": 2}
        assert state == to_boundary(direct.namespace["c"])


def test_criterion_5_warm_and_fresh_instances(gateway):
    text = ("ticks = 0\n\ndef tick():\n    global ticks\n    ticks += 1\n    return ticks\n\n"
            "if __name__ == \"__main__\":\n    tick()\n")
    with criterion(5, "global counter on a warm instance, then on a forced new one") as c:
        unit = transform_program(SourceModule.from_text("warmth", text)).units[0]
        client = HttpClient(gateway.url)
        client.deploy(package_unit(unit, unit.config).data)
        first = client.invoke(unit.unit_name, {"args": []})["return"]
        second = client.invoke(unit.unit_name, {"args": []})["return"]
        fresh = gateway.registry.invoke(unit.unit_name, {"args": []}, fresh=True)["return"]
        c["text"] += f": {first}, {second}, fresh {fresh}"
        assert (first, second, fresh) == (1, 2, 1)


def test_criterion_6_timeout(gateway):
    text = "def spin():\n    while True:\n        pass\n\nif __name__ == \"__main__\":\n    spin()\n"
    with criterion(6, "unbounded loop under timeout_s=1") as c:
        options = TransformOptions(mode="production", endpoint=gateway.url, timeout_s=1)
        result = transform_program(SourceModule.from_text("spinner", text), options)
        unit = result.units[0]
        assert unit.config.timeout_s == 1
        dispatcher = HttpDispatcher(gateway.url, result.units)
        dispatcher.ensure_deployed(unit.unit_name)
        start = time.monotonic()
        response = dispatcher.invoke(unit.unit_name, {"args": []})
        elapsed = time.monotonic() - start
        c["text"] += f": {response.get('error', {}).get('type')} after {elapsed:.3f}s"
        assert response["error"]["type"] == "Timeout"
        assert elapsed < 1.05


def test_criterion_7_overhead_direction():
    with criterion(7, "local overhead above 1 and lower with more compute per call") as c:
        fib20 = run_experiment(load("fib"), "fib(20)", "local", repetitions=3, aggregate="median")
        fib15 = run_experiment(load("fib"), "fib(15)", "local", repetitions=3, aggregate="median")
        fibw15 = run_experiment(load("fibw"), "fibw(15)", "local", repetitions=3, aggregate="median")
        c["text"] += (f": fib(20) {fib20.overhead:.2f}, fib(15) {fib15.overhead:.2f}, "
                      f"fibw(15) {fibw15.overhead:.2f}")
        assert not (fib20.failed or fib15.failed or fibw15.failed)
        assert fib20.overhead > 1
        assert fibw15.overhead < fib15.overhead


def _boundary_value(rng: random.Random, depth: int = 0):
    kind = rng.randrange(8 if depth < 3 else 6)
    if kind == 0:
        return None
    if kind == 1:
        return rng.random() < 0.5
    if kind == 2:
        return rng.randint(-2 ** 53, 2 ** 53)
    if kind == 3:
        return rng.uniform(-1e9, 1e9)
    if kind == 4:
        return "".join(chr(rng.choice([rng.randint(32, 126), rng.randint(160, 0x2FFF)]))
                       for _ in range(rng.randrange(6)))
    if kind == 5:
        return rng.choice([0, -0.0, "", "\n\t\"\\", 1e-300, 1.7976931348623157e308])
    if kind == 6:
        items = [_boundary_value(rng, depth + 1) for _ in range(rng.randrange(4))]
        return tuple(items) if rng.random() < 0.3 else items
    return {f"k{i}": _boundary_value(rng, depth + 1) for i in range(rng.randrange(4))}


def test_criterion_8_determinism_and_round_trips():
    with criterion(8, "parser round-trips, archive byte identity, JSON fixed point") as c:
        files = corpus_files()
        for path in files:
            tree = parse(path.read_text())
            text = emit(tree)
            assert parse(text) == tree, path.name
            assert emit(parse(text)) == text, path.name

        archives = 0
        for name in sorted(PROGRAMS):
            for unit in transform(name).units:
                data = package_unit(unit, unit.config).data
                unit_name, source, config = unpack(data)
                again = FunctionUnit(unit_name, config.handler_name, source, config)
                assert package_unit(again, config).data == data
                archives += 1

        rng = random.Random(20190)
        values = [_boundary_value(rng) for _ in range(1000)]
        for value in values:
            once = roundtrip(value)
            assert roundtrip(once) == once
        c["text"] += f": {len(files)} files, {archives} archives, {len(values)} values"
