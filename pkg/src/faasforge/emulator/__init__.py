"""Local FaaS emulator: a function registry with warm instance pools and an HTTP gateway."""
from __future__ import annotations

import json
import os
import re
import socket
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Dict, List, Optional, Tuple

from ..interpreter.instance import FunctionInstance
from ..interpreter.boundary import dumps, loads
from ..packager import PackagingError, UnitArchive, UnitConfig, unpack
from ..runtime import DEFAULT_POOL_SIZE, SHIM_MODULE, DispatchError, InstancePool, make_shim, pooled_invoke
from ..syntax import SyntaxFault, check_subset, nodes as n, parse

DEFAULT_BIND = "127.0.0.1:8799"
ENDPOINT_ENV = "FAASFORGE_ENDPOINT"
GRACE_MS = 50.0
# nested in-process invocations recurse on the request thread
THREAD_STACK_BYTES = 64 * 1024 * 1024


class EmulatorError(Exception):
    pass


class UnknownFunction(EmulatorError, KeyError):
    def __str__(self) -> str:
        return f"unknown function {self.args[0]!r}"


class DeploymentError(EmulatorError):
    pass


@dataclass(frozen=True)
class CreationReport:
    name: str
    deploy_ms: float
    replaced: bool = False

    def to_json(self) -> dict:
        return {"name": self.name, "deploy_ms": self.deploy_ms, "replaced": self.replaced}


@dataclass
class _Entry:
    archive: bytes
    config: UnitConfig
    source: str
    pool: InstancePool


def _validate_source(name: str, source: str, handler: str):
    try:
        tree = parse(source)
    except SyntaxFault as exc:
        raise DeploymentError(f"{name}: {exc}") from None
    violations = check_subset(tree)
    if violations:
        raise DeploymentError(f"{name}: source is outside the subset: {violations[0]}")
    for stmt in tree.body:
        if isinstance(stmt, n.FunctionDef) and stmt.name == handler:
            if len(stmt.params) != 2:
                raise DeploymentError(f"{name}: handler {handler} must take (event, context)")
            return
    raise DeploymentError(f"{name}: no handler named {handler}")


class FunctionRegistry:
    """Deployed units by name, each with its own pool of warm instances."""

    def __init__(self, pool_size: int = DEFAULT_POOL_SIZE, grace_ms: float = GRACE_MS):
        self.pool_size = pool_size
        self.grace_ms = grace_ms
        self._entries: Dict[str, _Entry] = {}
        self._lock = threading.Lock()
        self._shim = make_shim(self._nested_invoke)
        self.invocations = 0

    def _nested_invoke(self, name: str, event: dict) -> dict:
        try:
            return self.invoke(name, event)
        except UnknownFunction as exc:
            raise DispatchError(str(exc)) from None

    def create_function(self, name: str, archive) -> CreationReport:
        start = time.perf_counter()
        data = archive.data if isinstance(archive, UnitArchive) else bytes(archive)
        try:
            unit_name, source, config = unpack(data)
        except PackagingError as exc:
            raise DeploymentError(str(exc)) from None
        if name != config.name:
            raise DeploymentError(f"name {name!r} does not match archive config {config.name!r}")
        _validate_source(name, source, config.handler_name)
        with self._lock:
            old = self._entries.get(name)
            if old is not None and old.archive == data:
                return CreationReport(name, (time.perf_counter() - start) * 1000.0, False)
            pool = InstancePool(
                lambda: FunctionInstance(unit_name, source, config.handler_name, {SHIM_MODULE: self._shim}),
                self.pool_size,
            )
            self._entries[name] = _Entry(data, config, source, pool)
        if old is not None:
            old.pool.discard()
        return CreationReport(name, (time.perf_counter() - start) * 1000.0, old is not None)

    def delete_function(self, name: str) -> None:
        with self._lock:
            entry = self._entries.pop(name, None)
        if entry is None:
            raise UnknownFunction(name)
        entry.pool.discard()

    def list_functions(self) -> List[str]:
        with self._lock:
            return sorted(self._entries)

    def config(self, name: str) -> UnitConfig:
        return self._entry(name).config

    def pool(self, name: str) -> InstancePool:
        return self._entry(name).pool

    def _entry(self, name: str) -> _Entry:
        with self._lock:
            entry = self._entries.get(name)
        if entry is None:
            raise UnknownFunction(name)
        return entry

    def invoke(self, name: str, event: dict, fresh: bool = False) -> dict:
        """Run ``name``'s handler on a warm instance (or a new one when ``fresh``)."""
        entry = self._entry(name)
        with self._lock:
            self.invocations += 1
        return pooled_invoke(entry.pool, event, entry.config.timeout_s, fresh)


# -- HTTP gateway --------------------------------------------------------------------

_INVOKE = re.compile(r"^/functions/([A-Za-z_][A-Za-z0-9_]*)/invoke$")
_ONE = re.compile(r"^/functions/([A-Za-z_][A-Za-z0-9_]*)$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: "_Server"

    def setup(self):
        super().setup()
        # header and body go out in separate writes; avoid delayed-ACK stalls
        self.connection.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)

    def log_message(self, format, *args):  # quiet by default
        pass

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _send(self, status: int, payload=None, raw: Optional[bytes] = None):
        data = raw if raw is not None else (b"" if payload is None else json.dumps(payload).encode())
        self.send_response(status)
        if data:
            self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        if data:
            self.wfile.write(data)

    def do_GET(self):
        if self.path.rstrip("/") == "/functions":
            self._send(200, self.server.registry.list_functions())
        else:
            self._send(404, {"error": {"type": "NotFound", "message": self.path}})

    def do_POST(self):
        registry = self.server.registry
        body = self._body()
        if self.path.rstrip("/") == "/functions":
            try:
                _, _, config = unpack(body)
                report = registry.create_function(config.name, body)
            except (PackagingError, DeploymentError) as exc:
                self._send(400, {"error": {"type": "Deployment", "message": str(exc)}})
                return
            self._send(201, report.to_json())
            return
        match = _INVOKE.match(self.path)
        if match is None:
            self._send(404, {"error": {"type": "NotFound", "message": self.path}})
            return
        try:
            event = loads(body.decode("utf-8"))
            if not isinstance(event, dict):
                raise ValueError("event must be a JSON object")
        except (UnicodeDecodeError, ValueError) as exc:
            self._send(400, {"error": {"type": "BadRequest", "message": str(exc)}})
            return
        try:
            response = registry.invoke(match.group(1), event)
        except UnknownFunction as exc:
            self._send(404, {"error": {"type": "NotFound", "message": str(exc)}})
            return
        self._send(200, raw=dumps(response).encode("utf-8"))

    def do_DELETE(self):
        match = _ONE.match(self.path)
        if match is None:
            self._send(404, {"error": {"type": "NotFound", "message": self.path}})
            return
        try:
            self.server.registry.delete_function(match.group(1))
        except UnknownFunction as exc:
            self._send(404, {"error": {"type": "NotFound", "message": str(exc)}})
            return
        self._send(204)


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, registry: FunctionRegistry):
        super().__init__(address, _Handler)
        self.registry = registry


def parse_bind(bind: Optional[str]) -> Tuple[str, int]:
    bind = bind or os.environ.get(ENDPOINT_ENV) or DEFAULT_BIND
    if "//" in bind:
        bind = bind.split("//", 1)[1]
    bind = bind.rstrip("/")
    host, _, port = bind.rpartition(":")
    return host or "127.0.0.1", int(port)


class GatewayHandle:
    """A running gateway; ``url`` is the endpoint clients should use."""

    def __init__(self, server: _Server, thread: Optional[threading.Thread]):
        self.server = server
        self.thread = thread

    @property
    def registry(self) -> FunctionRegistry:
        return self.server.registry

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def serve_forever(self):
        self.server.serve_forever()

    def close(self):
        self.server.shutdown()
        self.server.server_close()
        if self.thread is not None:
            self.thread.join(timeout=5)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def gateway_serve(bind: Optional[str] = None, registry: Optional[FunctionRegistry] = None,
                  background: bool = True) -> GatewayHandle:
    """Bind the HTTP gateway; by default it serves from a daemon thread.

    Port 0 picks a free port.  The thread stack size is raised process-wide
    so deeply nested in-process invocations fit on request threads.
    """
    threading.stack_size(THREAD_STACK_BYTES)
    server = _Server(parse_bind(bind), registry or FunctionRegistry())
    thread = None
    if background:
        thread = threading.Thread(target=server.serve_forever, name="faasforge-gateway", daemon=True)
        thread.start()
    return GatewayHandle(server, thread)


__all__ = [
    "CreationReport", "DEFAULT_BIND", "DeploymentError", "ENDPOINT_ENV", "EmulatorError", "FunctionRegistry",
    "GatewayHandle", "GRACE_MS", "UnknownFunction", "gateway_serve", "parse_bind",
]
