"""Function instances: a unit's module state kept alive across invocations."""
from __future__ import annotations

import contextlib
import functools
import threading
import time
from typing import Optional

from ..syntax import nodes as n
from ..syntax import parse
from . import backend
from .boundary import dumps, loads, to_boundary
from .builtins import make_builtins, make_system_modules
from .values import BudgetExceeded, FunctionValue, RuntimeFault

_local = threading.local()


def current_deadline() -> Optional[float]:
    """Deadline of the invocation running on this thread, if any."""
    return getattr(_local, "deadline", None)


@contextlib.contextmanager
def deadline_scope(deadline: Optional[float]):
    previous = current_deadline()
    _local.deadline = deadline
    try:
        yield
    finally:
        _local.deadline = previous


def invocation_depth() -> int:
    return getattr(_local, "depth", 0)


@contextlib.contextmanager
def nested_invocation():
    _local.depth = invocation_depth() + 1
    try:
        yield
    finally:
        _local.depth -= 1


@functools.lru_cache(maxsize=256)
def parse_unit_source(text: str) -> n.Module:
    return parse(text)


class FunctionInstance:
    """One warm runtime environment for a unit.

    The unit's top level (imports, replicated globals, definitions) runs
    exactly once, when the instance is born.
    """

    def __init__(self, unit_name: str, source: str, handler_name: str = "lambda_handler",
                 system_modules: Optional[dict] = None):
        modules = make_system_modules()
        if system_modules:
            modules.update(system_modules)
        self.unit_name = unit_name
        self.evaluator = backend.Evaluator(make_builtins(), modules)
        self.module = self.evaluator.run_module_tree(unit_name, parse_unit_source(source), False)
        handler = self.module.namespace.get(handler_name)
        if not isinstance(handler, FunctionValue) or len(handler.params) != 2:
            raise RuntimeFault("TypeError", f"unit {unit_name} has no two-parameter handler {handler_name!r}")
        self.handler = handler
        self.invocations = 0

    @property
    def namespace(self) -> dict:
        return self.module.namespace

    def handle(self, event: dict, deadline: Optional[float] = None, max_steps: Optional[int] = None):
        ev = self.evaluator
        ev.steps = 0
        ev.set_budget(max_steps, deadline)
        self.invocations += 1
        try:
            return ev.invoke(self.handler, [event, {}])
        finally:
            ev.set_budget(None, None)


def error_payload(kind: str, message: str) -> dict:
    return {"error": {"type": kind, "message": message}}


def run_handler(instance: FunctionInstance, event: dict, timeout_s: Optional[float] = None) -> dict:
    """Run ``instance``'s handler under a wall-clock budget, JSON on both sides.

    Faults inside the unit become error payloads rather than exceptions.
    """
    try:
        decoded = loads(dumps(to_boundary(event)))
    except (RuntimeFault, TypeError, ValueError) as exc:
        return error_payload("Runtime", f"event is not JSON-representable: {exc}")
    deadline = None
    if timeout_s is not None:
        deadline = time.monotonic() + timeout_s
    parent = current_deadline()
    if parent is not None and (deadline is None or parent < deadline):
        deadline = parent
    try:
        with deadline_scope(deadline), nested_invocation():
            response = instance.handle(decoded, deadline)
        if not isinstance(response, dict):
            return error_payload("Runtime", "handler did not return a map")
        text = dumps(to_boundary(response))
    except BudgetExceeded as exc:
        return error_payload("Timeout", f"{instance.unit_name}: {exc.reason}")
    except RuntimeFault as exc:
        return error_payload(exc.error_type, str(exc))
    except RecursionError:
        return error_payload("Runtime", "RecursionError: maximum recursion depth exceeded")
    return loads(text)
