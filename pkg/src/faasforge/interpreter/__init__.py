"""Tree-walking evaluator for the subset.

Used three ways: as the oracle that runs original programs directly, as the
engine inside function instances, and as the local-mode dispatcher.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from . import backend
from .boundary import dumps, loads, roundtrip, to_boundary
from .builtins import BUILTIN_NAMES, SYSTEM_MODULES, make_builtins, make_system_modules
from .instance import FunctionInstance, error_payload, run_handler
from .values import (
    HIDDEN_CLASSNAME, BudgetExceeded, ClassValue, FunctionValue, ModuleValue,
    NativeFunction, ObjectInstance, RuntimeFault,
)

Value = Any


@dataclass(frozen=True)
class Limits:
    max_steps: Optional[int] = None
    wall_seconds: Optional[float] = None


@dataclass
class ExecResult:
    return_value: Value
    stdout: str
    call_count: int
    step_count: int
    namespace: dict = field(default_factory=dict, compare=False, repr=False)


def run_module(module, stdin: Sequence[str] = (), limits: Optional[Limits] = None,
               loader: Optional[Callable] = None, system_modules: Optional[dict] = None) -> ExecResult:
    """Execute ``module``'s top level and then its main guard.

    ``return_value`` is the value of the last expression statement evaluated
    directly in the main guard (None when there is none).  Faults propagate
    as :class:`RuntimeFault` / :class:`BudgetExceeded` with the output
    produced so far attached as ``.stdout``.
    """
    modules = make_system_modules()
    if system_modules:
        modules.update(system_modules)
    ev = backend.Evaluator(make_builtins(), modules, loader, stdin)
    if limits is not None:
        deadline = None if limits.wall_seconds is None else time.monotonic() + limits.wall_seconds
        ev.set_budget(limits.max_steps, deadline)
    try:
        mod = ev.run_module_tree(module.name, module.tree, True)
    except (RuntimeFault, BudgetExceeded) as exc:
        exc.stdout = ev.stdout
        raise
    except RecursionError:
        exc = RuntimeFault("RecursionError", "maximum recursion depth exceeded")
        exc.stdout = ev.stdout
        raise exc from None
    return ExecResult(ev.last_value, ev.stdout, ev.call_count, ev.steps, mod.namespace)


def call_with_json_roundtrip(unit, event: dict, instance: Optional[FunctionInstance] = None,
                             dispatcher=None) -> dict:
    """Invoke ``unit``'s handler the way a hosted runtime would.

    The event is serialized to JSON text and parsed back before the handler
    sees it, and the response takes the same trip, so tuples arrive as lists
    exactly as they would remotely.  Without an explicit ``instance`` a fresh
    one is born; without a ``dispatcher`` nested invocations are served by a
    local dispatcher that knows only ``unit``.
    """
    if instance is None:
        if dispatcher is None:
            from ..runtime import LocalDispatcher

            dispatcher = LocalDispatcher([unit])
        instance = dispatcher.birth(unit)
    return run_handler(instance, event, unit.config.timeout_s)


__all__ = [
    "BUILTIN_NAMES", "SYSTEM_MODULES", "HIDDEN_CLASSNAME", "BudgetExceeded", "ClassValue",
    "ExecResult", "FunctionInstance", "FunctionValue", "Limits", "ModuleValue", "NativeFunction",
    "ObjectInstance", "RuntimeFault", "Value", "backend", "call_with_json_roundtrip", "dumps",
    "error_payload", "loads", "roundtrip", "run_handler", "run_module", "to_boundary",
]
