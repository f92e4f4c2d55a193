"""Client and instance side of the invocation boundary.

``faas_runtime`` is the host-provided module every generated unit and
rewritten module imports.  Its ``invoke`` hands the event to a dispatcher:
local mode runs units in pooled in-process instances, production mode posts
them to an emulator endpoint and deploys each unit on first use.
"""
from __future__ import annotations

import collections
import http.client
import json
import socket
import threading
import time
from typing import Callable, Dict, Iterable, List, Optional, Sequence
from urllib.parse import urlsplit

from .interpreter import ExecResult, Limits, backend
from .interpreter.boundary import dumps, loads, to_boundary
from .interpreter.builtins import make_builtins, make_system_modules
from .interpreter.instance import FunctionInstance, error_payload, invocation_depth, run_handler
from .interpreter.values import (
    HIDDEN_CLASSNAME, BoundMethod, BudgetExceeded, ClassValue, ModuleValue, NativeFunction,
    ObjectInstance, RuntimeFault,
)

SHIM_MODULE = "faas_runtime"
DEFAULT_POOL_SIZE = 8


class DispatchError(Exception):
    """The dispatcher itself failed (unknown unit, unreachable endpoint)."""


# -- the faas_runtime module ------------------------------------------------------

def _require_object(value, what: str) -> ObjectInstance:
    if not isinstance(value, ObjectInstance):
        raise RuntimeFault("TypeError", f"{what} expects an object")
    return value


def make_shim(invoke: Callable[[str, dict], dict]) -> ModuleValue:
    """Build the ``faas_runtime`` module bound to an invoke callable."""

    def _invoke(interp, name, event):
        if not isinstance(name, str) or not isinstance(event, dict):
            raise RuntimeFault("TypeError", "invoke(name, event) expects a string and a map")
        try:
            response = invoke(name, event)
        except DispatchError as exc:
            raise RuntimeFault("Runtime", str(exc), kind_is_error_type=True) from None
        error = response.get("error")
        if error is not None:
            raise RuntimeFault(error.get("type", "Runtime"), f"{name}: {error.get('message', '')}",
                               kind_is_error_type=True)
        return response

    def _emit(interp, text):
        interp.write(str(text))

    def _stdin_rest(interp):
        return interp.stdin[interp.stdin_pos:]

    def _stdin_consume(interp, count):
        interp.stdin_pos += int(count)

    def _tail(interp, items, pos):
        return list(items[pos:])

    def _stdin_take(interp, items, pos):
        if pos >= len(items):
            raise RuntimeFault("EOFError", "stdin exhausted")
        return items[pos]

    def _get_state(interp, obj):
        obj = _require_object(obj, "get_state")
        return {k: v for k, v in obj.attrs.items() if k != HIDDEN_CLASSNAME}

    def _set_state(interp, obj, state, classname):
        obj = _require_object(obj, "set_state")
        if not isinstance(state, dict):
            raise RuntimeFault("TypeError", "state must be a map")
        attrs = dict(state)
        attrs[HIDDEN_CLASSNAME] = classname
        obj.attrs = attrs

    def _restore(interp, cls, state):
        if not isinstance(cls, ClassValue) or not isinstance(state, dict):
            raise RuntimeFault("TypeError", "restore(class, state) expects a class and a map")
        return ObjectInstance(cls, dict(state))

    def _call_method(interp, obj, name, args):
        obj = _require_object(obj, "call_method")
        method = obj.cls.methods.get(name)
        if method is None:
            raise RuntimeFault("AttributeError", f"'{obj.cls.name}' object has no method '{name}'")
        return interp.call(BoundMethod(obj, method), list(args))

    def _fail(interp, kind, message):
        raise RuntimeFault(str(kind), str(message))

    table = {
        "invoke": _invoke, "emit": _emit, "stdin_rest": _stdin_rest, "stdin_consume": _stdin_consume,
        "tail": _tail, "stdin_take": _stdin_take, "get_state": _get_state, "set_state": _set_state,
        "restore": _restore, "call_method": _call_method, "fail": _fail,
    }
    return ModuleValue(SHIM_MODULE, {k: NativeFunction(k, fn) for k, fn in table.items()})


# -- instance pools -----------------------------------------------------------------

class InstancePool:
    """Warm instances of one unit.

    Idle instances are reused least-recently-used first.  A new instance is
    born when all are busy, up to ``cap``; further top-level requests wait in
    FIFO order.  Invocations nested inside another invocation on the same
    thread never wait: a recursive unit would otherwise deadlock once its
    call depth exceeds the cap.
    """

    def __init__(self, factory: Callable[[], FunctionInstance], cap: int = DEFAULT_POOL_SIZE):
        self.factory = factory
        self.cap = cap
        self._cond = threading.Condition()
        self._idle: collections.deque = collections.deque()
        self._waiting: collections.deque = collections.deque()
        self.total = 0
        self.births = 0
        self.closed = False

    def _birth(self) -> FunctionInstance:
        try:
            inst = self.factory()
        except BaseException:
            with self._cond:
                self.total -= 1
                self._cond.notify_all()
            raise
        with self._cond:
            self.births += 1
        return inst

    def acquire(self, fresh: bool = False) -> FunctionInstance:
        nested = invocation_depth() > 0
        with self._cond:
            if fresh or nested:
                if not fresh and self._idle:
                    return self._idle.popleft()
                self.total += 1
            else:
                ticket = object()
                self._waiting.append(ticket)
                try:
                    while True:
                        if self._waiting[0] is ticket:
                            if self._idle:
                                return self._idle.popleft()
                            if self.total < self.cap:
                                self.total += 1
                                break
                        self._cond.wait()
                finally:
                    self._waiting.remove(ticket)
                    self._cond.notify_all()
        return self._birth()

    def release(self, inst: FunctionInstance):
        with self._cond:
            if self.closed or self.total > self.cap:
                self.total -= 1
            else:
                self._idle.append(inst)
            self._cond.notify_all()

    def discard(self):
        """Drop idle instances; busy ones are dropped when released."""
        with self._cond:
            self.closed = True
            self.total -= len(self._idle)
            self._idle.clear()
            self._cond.notify_all()

    @property
    def idle(self) -> int:
        return len(self._idle)


def pooled_invoke(pool: InstancePool, event: dict, timeout_s: Optional[float], fresh: bool = False) -> dict:
    try:
        inst = pool.acquire(fresh)
    except (RuntimeFault, BudgetExceeded, RecursionError) as exc:
        kind = "Timeout" if isinstance(exc, BudgetExceeded) else "Runtime"
        return error_payload(kind, f"instance start failed: {exc}")
    try:
        return run_handler(inst, event, timeout_s)
    finally:
        pool.release(inst)


# -- dispatchers --------------------------------------------------------------------

class LocalDispatcher:
    """Runs units in-process with hosted-function semantics.

    Every invocation crosses a JSON boundary in both directions and runs in a
    pooled warm instance whose module state persists between invocations.
    """

    def __init__(self, units: Iterable = (), pool_size: int = DEFAULT_POOL_SIZE):
        self.units: Dict[str, object] = {}
        self.pools: Dict[str, InstancePool] = {}
        self.pool_size = pool_size
        self.counts: Dict[str, int] = collections.Counter()
        self._lock = threading.Lock()
        self._shim = make_shim(self.invoke)
        for unit in units:
            self.add(unit)

    def add(self, unit):
        with self._lock:
            old = self.pools.pop(unit.unit_name, None)
            if old is not None:
                old.discard()
            self.units[unit.unit_name] = unit
            self.pools[unit.unit_name] = InstancePool(lambda u=unit: self.birth(u), self.pool_size)

    def birth(self, unit) -> FunctionInstance:
        return FunctionInstance(unit.unit_name, unit.source, unit.handler_name, {SHIM_MODULE: self._shim})

    @property
    def invocations(self) -> int:
        return sum(self.counts.values())

    def invoke(self, name: str, event: dict, fresh: bool = False) -> dict:
        pool = self.pools.get(name)
        if pool is None:
            raise DispatchError(f"unknown function {name!r}")
        with self._lock:
            self.counts[name] += 1
        return pooled_invoke(pool, event, self.units[name].config.timeout_s, fresh)


class _Connections(threading.local):
    conn: Optional[http.client.HTTPConnection] = None


def _split_endpoint(endpoint: str):
    if "//" not in endpoint:
        endpoint = "http://" + endpoint
    parts = urlsplit(endpoint)
    return parts.hostname or "127.0.0.1", parts.port or 80


class HttpClient:
    """Minimal JSON client for the emulator's HTTP interface."""

    def __init__(self, endpoint: str, timeout: float = 330.0):
        self.endpoint = endpoint
        self.host, self.port = _split_endpoint(endpoint)
        self.timeout = timeout
        self._local = _Connections()

    def request(self, method: str, path: str, body: bytes = b"", content_type: str = "application/json"):
        for attempt in (0, 1):
            conn = self._local.conn
            if conn is None:
                conn = http.client.HTTPConnection(self.host, self.port, timeout=self.timeout)
                conn.connect()
                conn.sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
                self._local.conn = conn
            try:
                conn.request(method, path, body=body, headers={"Content-Type": content_type})
                resp = conn.getresponse()
                data = resp.read()
                return resp.status, data
            except (ConnectionError, http.client.HTTPException, OSError) as exc:
                conn.close()
                self._local.conn = None
                if attempt:
                    raise DispatchError(f"endpoint {self.endpoint} unreachable: {exc}") from None
        raise AssertionError("unreachable")

    def deploy(self, archive: bytes) -> dict:
        status, data = self.request("POST", "/functions", archive, "application/zip")
        if status != 201:
            raise DispatchError(f"deploy failed ({status}): {data.decode('utf-8', 'replace')}")
        return json.loads(data)

    def invoke(self, name: str, event: dict) -> dict:
        status, data = self.request("POST", f"/functions/{name}/invoke", dumps(to_boundary(event)).encode())
        if status != 200:
            raise DispatchError(f"invoke {name} failed ({status}): {data.decode('utf-8', 'replace')}")
        return loads(data.decode("utf-8"))

    def list(self) -> List[str]:
        status, data = self.request("GET", "/functions")
        if status != 200:
            raise DispatchError(f"listing failed ({status})")
        return json.loads(data)

    def delete(self, name: str) -> bool:
        status, _ = self.request("DELETE", f"/functions/{name}")
        return status == 204


class HttpDispatcher:
    """Production-mode dispatcher: deploy on first invocation, then invoke.

    Deploying a unit also deploys every unit it can invoke, because nested
    invocations are resolved inside the emulator.
    """

    def __init__(self, endpoint: str, units: Iterable = ()):
        self.client = HttpClient(endpoint)
        self.units = {u.unit_name: u for u in units}
        self.deployed: Dict[str, float] = {}
        self.counts: Dict[str, int] = collections.Counter()
        self._lock = threading.Lock()

    @property
    def deploy_ms(self) -> float:
        return sum(self.deployed.values())

    def ensure_deployed(self, name: str):
        from .packager import package_unit

        with self._lock:
            todo = [name]
            while todo:
                current = todo.pop()
                if current in self.deployed:
                    continue
                unit = self.units.get(current)
                if unit is None:
                    raise DispatchError(f"unknown function {current!r}")
                report = self.client.deploy(package_unit(unit, unit.config).data)
                self.deployed[current] = float(report.get("deploy_ms", 0.0))
                todo.extend(unit.dependencies)

    def invoke(self, name: str, event: dict) -> dict:
        if name not in self.deployed:
            self.ensure_deployed(name)
        self.counts[name] += 1
        return self.client.invoke(name, event)


# -- running a transformed program -------------------------------------------------------

def execute_program(result, dispatcher, stdin: Sequence[str] = (), limits: Optional[Limits] = None) -> ExecResult:
    """Run a transformed program's entry module with stubs bound to ``dispatcher``.

    Application imports resolve to the other rewritten modules of ``result``.
    """
    rewritten = {m.name: m for m in result.modules}
    entry = result.modules[0]
    modules = make_system_modules()
    modules[SHIM_MODULE] = make_shim(dispatcher.invoke)
    ev = backend.Evaluator(make_builtins(), modules, rewritten.get, stdin)
    if limits is not None:
        deadline = None if limits.wall_seconds is None else time.monotonic() + limits.wall_seconds
        ev.set_budget(limits.max_steps, deadline)
    try:
        mod = ev.run_module_tree(entry.name, entry.tree, True)
    except (RuntimeFault, BudgetExceeded) as exc:
        exc.stdout = ev.stdout
        raise
    except RecursionError:
        exc = RuntimeFault("RecursionError", "maximum recursion depth exceeded")
        exc.stdout = ev.stdout
        raise exc from None
    return ExecResult(ev.last_value, ev.stdout, ev.call_count, ev.steps, mod.namespace)
