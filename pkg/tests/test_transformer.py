from __future__ import annotations

import pytest

from faasforge.analyzer import ModuleLoader, build_dependency_map
from faasforge.interpreter import call_with_json_roundtrip
from faasforge.syntax import SourceModule, check_subset, emit, nodes as n, parse
from faasforge.transformer import (
    TransformError, TransformOptions, inject_io_monads, proxy_spec, transform_class, transform_function,
    transform_program,
)

from helpers import CORPUS, PROGRAMS, fib_memo, load, transform


def program(text: str, name: str = "app"):
    return transform_program(SourceModule.from_text(name, text))


def test_fib_units_and_stub_signature():
    result = transform("fib")
    assert [u.unit_name for u in result.units] == ["fib_fib"]
    unit = result.units[0]
    assert unit.handler_name == "lambda_handler"
    assert unit.config.handler == "fib_fib.lambda_handler"
    stub = next(s for s in result.rewritten.tree.body if isinstance(s, n.FunctionDef))
    assert stub.name == "fib" and stub.params == ("x",)
    assert 'faas_runtime.invoke("fib_fib"' in result.rewritten.source
    # the main guard survives verbatim
    assert isinstance(result.rewritten.tree.body[-1], n.MainGuard)


def test_unit_source_is_in_subset_and_self_calls_dispatch():
    unit = transform("fib").units[0]
    assert check_subset(unit.tree) == []
    assert "_faas_call_fib_fib(x - 1)" in unit.source
    handler = [s for s in unit.tree.body if isinstance(s, n.FunctionDef)][-1]
    assert handler.name == "lambda_handler" and handler.params == ("event", "context")


def test_transform_function_direct_api():
    mod = load("fib")
    deps = build_dependency_map(mod, ModuleLoader([CORPUS]))
    stub, unit = transform_function(mod.tree.body[0], deps)
    assert stub.name == "fib" and unit.unit_name == "fib_fib"


@pytest.mark.parametrize("x", [1, 2, 5, 8])
def test_isolated_unit_is_pure_fib_with_dispatcher(x):
    # with no remote endpoint the recursive stubs run the same unit again in-process
    unit = transform("fib").units[0]
    response = call_with_json_roundtrip(unit, {"args": [x]})
    assert response["return"] == fib_memo(x)
    assert response["stdout"] == ""


def test_globals_are_replicated_into_units():
    unit = transform("fibs").units[0]
    assert [name for name, _ in unit.replicated_globals] == ["invocations"]
    assert unit.source.splitlines()[1] == "invocations = 0"


def test_io_monad_prelude_and_handler_fields():
    result = transform("greet")
    unit = result.unit("greet_ask_name")
    assert unit.io_flags.uses_input
    assert "_faas_input(" in unit.source and "input(" not in unit.source.replace("_faas_input(", "")
    response = call_with_json_roundtrip(unit, {"args": [], "stdin": ["zed", "more"]})
    assert response == {"return": "zed", "stdout": "name? ", "consumed": 1}


def test_print_goes_to_stdout_field():
    unit = program("def hi(a, b):\n    print(a, b)\n    print()\n    return 0\n\n"
                   "if __name__ == \"__main__\":\n    hi(1, \"x\")\n").units[0]
    assert call_with_json_roundtrip(unit, {"args": [1, "x"]}) == {"return": 0, "stdout": "1 x\n\n"}


def test_inject_io_monads_is_idempotent():
    unit = transform("greet").unit("greet_greet")
    assert inject_io_monads(unit) == unit
    assert inject_io_monads(inject_io_monads(unit)).source == unit.source


def test_class_proxy_and_units():
    result = transform("counter")
    names = sorted(u.unit_name for u in result.units)
    assert names == ["counter_Counter___remote__init__", "counter_Counter_increment"]
    proxy = next(s for s in result.rewritten.tree.body if isinstance(s, n.ClassDef))
    assert proxy.name == "Counter"
    assert [m.name for m in proxy.methods] == ["__init__", "__remote__init__", "increment"]


def test_class_unit_round_trips_state():
    result = transform("counter")
    init = result.unit("counter_Counter___remote__init__")
    inc = result.unit("counter_Counter_increment")
    created = call_with_json_roundtrip(init, {"args": [], "state": {}, "classname": "Counter",
                                              "method": "__remote__init__"})
    assert created["state"] == {"count": 0}
    step = call_with_json_roundtrip(inc, {"args": [], "state": created["state"], "classname": "Counter",
                                          "method": "increment"})
    assert step["state"] == {"count": 1} and step["return"] == 1


def test_transform_class_direct_api_and_proxy_spec():
    mod = load("counter")
    deps = build_dependency_map(mod, ModuleLoader([CORPUS]))
    cls = mod.tree.body[0]
    proxy, units = transform_class(cls, deps)
    assert proxy.name == "Counter" and len(units) == 2
    spec = proxy_spec(cls, "counter")
    assert spec.method_names == ("__remote__init__", "increment")
    assert spec.state_excludes == "__classname__"


def test_cross_module_units_drop_application_imports():
    result = transform("shapes_app")
    assert [m.name for m in result.modules] == ["shapes_app", "geometry", "textutil"]
    report = result.unit("shapes_app_report")
    assert "import geometry" not in report.source
    assert "_faas_call_geometry_circle_area(" in report.source
    assert set(report.dependencies) >= {"geometry_circle_area", "textutil_shout", "geometry_round_to"}


def test_unreachable_code_kept_verbatim():
    text = ("def used():\n    return 1\n\ndef spare(y):\n    return y * 2\n\n"
            "if __name__ == \"__main__\":\n    print(used())\n")
    result = program(text)
    assert [u.unit_name for u in result.units] == ["app_used"]
    assert "def spare(y):\n    return y * 2\n" in result.rewritten.source


def test_result_unpacks_as_triple():
    rewritten, units, ms = transform("fib")
    assert rewritten.name == "fib" and len(units) == 1 and ms >= 0


def test_unit_name_collisions_get_suffixes():
    # "a_b" in module "x" and "b" in class "a" both want "x_a_b"
    text = ("class a:\n    def b(self):\n        return 1\n\ndef a_b():\n    return 2\n\n"
            "if __name__ == \"__main__\":\n    o = a()\n    print(o.b(), a_b())\n")
    names = [u.unit_name for u in program(text, "x").units]
    assert len(names) == len(set(names))
    assert any(name.endswith("_2") for name in names)


def test_reserved_names_rejected():
    with pytest.raises(TransformError):
        program("def _faas_x():\n    return 1\n\nif __name__ == \"__main__\":\n    _faas_x()\n")
    with pytest.raises(TransformError):
        program("def lambda_handler(e, c):\n    return 1\n\nif __name__ == \"__main__\":\n    lambda_handler(1, 2)\n")


def test_arity_mismatch_rejected():
    with pytest.raises(TransformError):
        program("def f(a):\n    return a\n\nif __name__ == \"__main__\":\n    f(1, 2)\n")


def test_options_validation():
    with pytest.raises(ValueError):
        TransformOptions(mode="cloud")
    with pytest.raises(ValueError):
        TransformOptions(mode="production")


@pytest.mark.parametrize("name", sorted(PROGRAMS))
def test_every_generated_file_reparses(name):
    result = transform(name)
    for source in [m.source for m in result.modules] + [u.source for u in result.units]:
        assert emit(parse(source)) == source
