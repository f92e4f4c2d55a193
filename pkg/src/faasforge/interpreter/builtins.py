"""Built-in callables and system modules visible to interpreted code."""
from __future__ import annotations

import math
from typing import Dict

from .values import ModuleValue, NativeFunction, RuntimeFault

BUILTIN_NAMES = ("print", "input", "len", "range", "str", "int", "float")
SYSTEM_MODULES = ("math",)


def _print(interp, *args):
    interp.write(" ".join(str(a) for a in args) + "\n")


def _input(interp, *args):
    if len(args) > 1:
        raise RuntimeFault("TypeError", f"input expected at most 1 argument, got {len(args)}")
    if args:
        interp.write(str(args[0]))
    return interp.read_line()


def _len(interp, value):
    return len(value)


def _range(interp, *args):
    raise RuntimeFault("TypeError", "range() may only be used as a for-loop iterable")


def _str(interp, *args):
    return str(*args)


def _int(interp, *args):
    return int(*args)


def _float(interp, *args):
    return float(*args)


def _real(fn):
    def call(interp, x):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise RuntimeFault("TypeError", "must be real number, not " + type(x).__name__)
        try:
            return fn(x)
        except ValueError as exc:
            raise RuntimeFault("ValueError", str(exc)) from None
    return call


_MATH_FUNCTIONS = ("sin", "cos", "sqrt", "floor", "ceil", "exp", "log")


def make_builtins() -> Dict[str, NativeFunction]:
    table = {
        "print": _print,
        "input": _input,
        "len": _len,
        "range": _range,
        "str": _str,
        "int": _int,
        "float": _float,
    }
    return {name: NativeFunction(name, fn) for name, fn in table.items()}


def make_system_modules() -> Dict[str, ModuleValue]:
    namespace = {name: NativeFunction(name, _real(getattr(math, name))) for name in _MATH_FUNCTIONS}
    namespace["pi"] = math.pi
    return {"math": ModuleValue("math", namespace)}
