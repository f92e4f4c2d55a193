"""Runtime value types beyond the native int/float/str/bool/None/list/tuple/dict."""
from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Optional

from ..syntax import nodes as n

# attribute key under which a proxy object remembers the class it stands in for
HIDDEN_CLASSNAME = "__classname__"


class RuntimeFault(Exception):
    """A fault raised by interpreted code (type error, missing name, ...)."""

    def __init__(self, kind: str, message: str, span: Optional[n.Span] = None, kind_is_error_type: bool = False):
        where = f"{span}: " if span is not None and span.line else ""
        super().__init__(f"{where}{kind}: {message}")
        self.kind = kind
        self.message = message
        self.span = span
        # "Runtime" unless a remote invocation reported a different error type
        self.error_type = kind if kind_is_error_type else "Runtime"


class BudgetExceeded(Exception):
    """Step or wall-clock budget exhausted; maps to a Timeout error payload."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class FunctionValue:
    __slots__ = ("name", "qualname", "modname", "node", "params", "localnames", "module_globals")

    def __init__(self, node: n.FunctionDef, modname: str, qualname: str, localnames: FrozenSet[str],
                 module_globals: dict):
        self.name = node.name
        self.modname = modname
        self.qualname = qualname
        self.node = node
        self.params = node.params
        self.localnames = localnames
        self.module_globals = module_globals

    def __repr__(self) -> str:
        return f"<function {self.qualname}>"


class ClassValue:
    __slots__ = ("name", "qualname", "methods")

    def __init__(self, name: str, qualname: str, methods: Dict[str, FunctionValue]):
        self.name = name
        self.qualname = qualname
        self.methods = methods

    def __repr__(self) -> str:
        return f"<class {self.qualname}>"


class ObjectInstance:
    __slots__ = ("cls", "attrs")

    def __init__(self, cls: ClassValue, attrs: Optional[dict] = None):
        self.cls = cls
        self.attrs = {} if attrs is None else attrs

    def __repr__(self) -> str:
        return f"<{self.cls.qualname} object>"


class BoundMethod:
    __slots__ = ("receiver", "func")

    def __init__(self, receiver: ObjectInstance, func: FunctionValue):
        self.receiver = receiver
        self.func = func

    def __repr__(self) -> str:
        return f"<bound method {self.func.qualname}>"


class ModuleValue:
    __slots__ = ("name", "namespace")

    def __init__(self, name: str, namespace: dict):
        self.name = name
        self.namespace = namespace

    def __repr__(self) -> str:
        return f"<module {self.name}>"


class NativeFunction:
    """Host-implemented callable.  ``fn`` receives the interpreter first."""

    __slots__ = ("name", "fn")

    def __init__(self, name: str, fn: Callable):
        self.name = name
        self.fn = fn

    def __repr__(self) -> str:
        return f"<built-in function {self.name}>"
