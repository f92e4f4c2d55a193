"""Rewrite programs into client modules plus deployable function units.

Every reachable function becomes a unit (``<module>_<function>``) and a
client stub with the same signature; every reachable class becomes one unit
per method plus a ``__remote__init__`` unit, and a client proxy class.
Calls between units, including self-recursion, go through
``faas_runtime.invoke`` so each one crosses a JSON boundary.
"""
from __future__ import annotations

import dataclasses
import functools
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from ..analyzer import (
    DependencyMap, FeatureFlags, ModuleLoader, build_dependency_map, collect_globals,
    detect_features,
)
from ..packager import UnitConfig
from ..syntax import SourceModule, Span, check_subset, emit, emit_expr, parse
from ..syntax import nodes as n
from . import templates as t
from .templates import CLIENT, HANDLER, REMOTE_INIT, RESERVED_PREFIX, RUNTIME, UNIT

MODES = ("debug", "local", "production")


class TransformError(Exception):
    def __init__(self, module: str, span: Optional[Span], message: str):
        self.module = module
        self.span = span
        self.message = message
        where = f"{module}:{span.line}:{span.column}" if span is not None and span.line else module
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class FunctionUnit:
    unit_name: str
    handler_name: str
    source: str
    config: UnitConfig
    replicated_globals: Tuple[Tuple[str, n.Expr], ...] = ()
    io_flags: FeatureFlags = FeatureFlags()
    qualname: str = ""
    dependencies: Tuple[str, ...] = ()

    @property
    def tree(self) -> n.Module:
        return _parse_cached(self.source)


@dataclass(frozen=True)
class RewrittenModule:
    name: str
    source: str

    @property
    def tree(self) -> n.Module:
        return _parse_cached(self.source)


@dataclass(frozen=True)
class ProxySpec:
    class_name: str
    method_names: Tuple[str, ...]
    module: str = ""
    # the hidden attribute naming the class is never part of the shipped state
    state_excludes: str = "__classname__"


@dataclass(frozen=True)
class TransformOptions:
    mode: str = "local"
    endpoint: Optional[str] = None
    paths: Tuple[str, ...] = ()
    memory_mb: int = 128
    timeout_s: int = 300

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "production" and not self.endpoint:
            raise ValueError("production mode needs an endpoint")


@dataclass
class TransformResult:
    modules: List[RewrittenModule]
    units: List[FunctionUnit]
    elapsed_ms: float
    deps: Optional[DependencyMap] = field(default=None, repr=False)

    @property
    def rewritten(self) -> RewrittenModule:
        return self.modules[0]

    def unit(self, name: str) -> FunctionUnit:
        for unit in self.units:
            if unit.unit_name == name:
                return unit
        raise KeyError(name)

    def __iter__(self) -> Iterator:
        # unpacks as (entry module, units, L in milliseconds)
        return iter((self.rewritten, self.units, self.elapsed_ms))


@functools.lru_cache(maxsize=512)
def _parse_cached(source: str) -> n.Module:
    return parse(source)


# -- tree helpers ----------------------------------------------------------------

def map_tree(node, fn):
    """Rebuild ``node`` bottom-up, applying ``fn`` to every rebuilt node."""

    def conv(value):
        if isinstance(value, n.Node):
            return map_tree(value, fn)
        if isinstance(value, tuple):
            return tuple(conv(v) for v in value)
        return value

    changes = {f.name: conv(getattr(node, f.name)) for f in dataclasses.fields(node) if f.name != "span"}
    return fn(dataclasses.replace(node, **changes))


def _methods(cls: n.ClassDef) -> List[n.FunctionDef]:
    return [m for m in cls.methods if isinstance(m, n.FunctionDef)]


def _find_init(cls: n.ClassDef) -> Optional[n.FunctionDef]:
    for m in _methods(cls):
        if m.name == "__init__":
            return m
    return None


# -- program context ---------------------------------------------------------------

class _Program:
    """Lookups shared by every transform over one dependency map."""

    def __init__(self, deps: DependencyMap, options: Optional[TransformOptions] = None):
        self.deps = deps
        self.options = options or TransformOptions()
        self.functions: Dict[str, n.FunctionDef] = {}
        self.classes: Dict[str, n.ClassDef] = {}
        self.owner: Dict[int, Tuple[str, Optional[str]]] = {}
        self.app_modules: Set[str] = set(deps.modules)
        for mod in deps.modules.values():
            for stmt in mod.tree.body:
                if isinstance(stmt, n.FunctionDef):
                    self.functions[f"{mod.name}.{stmt.name}"] = stmt
                    self.owner[id(stmt)] = (mod.name, None)
                elif isinstance(stmt, n.ClassDef):
                    self.classes[f"{mod.name}.{stmt.name}"] = stmt
                    self.owner[id(stmt)] = (mod.name, stmt.name)
                    for m in _methods(stmt):
                        self.owner[id(m)] = (mod.name, stmt.name)
        self.unit_names = self._name_units()
        self._flags: Dict[str, FeatureFlags] = {}

    def _name_units(self) -> Dict[str, str]:
        names: Dict[str, str] = {}
        taken: Set[str] = set()
        for qual in sorted(self.deps.nodes):
            parts = qual.split(".")
            if len(parts) == 3 and parts[2] == "__init__":
                parts[2] = REMOTE_INIT
            base = "_".join(parts)
            name, k = base, 2
            while name in taken:
                name, k = f"{base}_{k}", k + 1
            taken.add(name)
            names[qual] = name
        return names

    def definition(self, qual: str) -> Optional[n.FunctionDef]:
        parts = qual.split(".")
        if len(parts) == 2:
            return self.functions.get(qual)
        cls = self.classes.get(f"{parts[0]}.{parts[1]}")
        if cls is None:
            return None
        for m in _methods(cls):
            if m.name == parts[2]:
                return m
        return None

    def module_globals(self, module: str) -> List[Tuple[str, n.Expr]]:
        return collect_globals(self.deps.modules[module])

    def direct_flags(self, qual: str) -> FeatureFlags:
        fn = self.definition(qual)
        if fn is None:
            return FeatureFlags()
        names = [name for name, _ in self.module_globals(qual.split(".")[0])]
        return detect_features(fn, names)

    def flags(self, qual: str) -> FeatureFlags:
        """print/input use of everything ``qual`` can reach, plus its own globals."""
        cached = self._flags.get(qual)
        if cached is not None:
            return cached
        own = self.direct_flags(qual)
        seen, todo = {qual}, [qual]
        uses_print, uses_input = own.uses_print, own.uses_input
        while todo:
            current = todo.pop()
            f = self.direct_flags(current)
            uses_print |= f.uses_print
            uses_input |= f.uses_input
            for callee in self.deps.callees(current):
                if callee not in seen:
                    seen.add(callee)
                    todo.append(callee)
        result = FeatureFlags(uses_print, uses_input, own.global_reads, own.global_writes)
        self._flags[qual] = result
        return result

    def class_flags(self, cls_qual: str) -> FeatureFlags:
        cls = self.classes[cls_qual]
        quals = [f"{cls_qual}.__init__"] + [f"{cls_qual}.{m.name}" for m in _methods(cls) if m.name != "__init__"]
        merged = FeatureFlags()
        for qual in quals:
            merged = merged.merge(self.flags(qual))
        return merged

    def class_methods(self, cls_qual: str) -> List[Tuple[str, Sequence[str], str]]:
        """``(method name, params, unit name)`` with the constructor first."""
        cls = self.classes[cls_qual]
        init = _find_init(cls)
        entries = [(REMOTE_INIT, init.params if init is not None else ("self",),
                    self.unit_names[f"{cls_qual}.__init__"])]
        for m in _methods(cls):
            if m.name != "__init__":
                entries.append((m.name, m.params, self.unit_names[f"{cls_qual}.{m.name}"]))
        return entries

    def config(self, unit_name: str) -> UnitConfig:
        return UnitConfig(unit_name, memory_mb=self.options.memory_mb, timeout_s=self.options.timeout_s)

    def proxy_source(self, cls_qual: str, name: str, side: str) -> str:
        cls = self.classes[cls_qual]
        init = _find_init(cls)
        init_params = init.params if init is not None else ("self",)
        return t.proxy_class(name, cls.name, init_params, self.class_methods(cls_qual),
                             self.class_flags(cls_qual), side)


def _check_reserved(deps: DependencyMap):
    def bad(name: str) -> bool:
        return name.startswith(RESERVED_PREFIX) or name in (RUNTIME, HANDLER, REMOTE_INIT)

    for mod in deps.modules.values():
        for node in n.walk(mod.tree):
            names: List[str] = []
            if isinstance(node, n.Name):
                names = [node.id]
            elif isinstance(node, n.FunctionDef):
                names = [node.name, *node.params]
            elif isinstance(node, n.ClassDef):
                names = [node.name]
            elif isinstance(node, (n.GlobalDecl, n.Import)):
                names = list(node.names)
            elif isinstance(node, n.ForRange):
                names = [node.var]
            elif isinstance(node, n.Attribute):
                names = [node.attr]
            for name in names:
                if bad(name):
                    raise TransformError(mod.name, node.span, f"{name!r} is reserved for generated code")


def _check_arity(prog: _Program):
    deps = prog.deps
    for mod in deps.modules.values():
        for node in n.walk(mod.tree):
            if not isinstance(node, n.Call):
                continue
            target = deps.target_of(mod.name, node)
            if target is None or target in deps.system_callees:
                continue
            fn = prog.definition(target)
            parts = target.split(".")
            if len(parts) == 2:
                expected = len(fn.params)
            elif fn is None:  # implicit constructor
                expected = 0
            else:
                expected = len(fn.params) - 1
            if len(node.args) != expected:
                raise TransformError(mod.name, node.span,
                                     f"{target} takes {expected} argument(s) but the call passes {len(node.args)}")


# -- unit body rewriting ---------------------------------------------------------------

class _UnitBuilder:
    """Collects what one unit needs while its code is rewritten."""

    def __init__(self, prog: _Program, module: str, own_class: Optional[str]):
        self.prog = prog
        self.module = module
        self.own_class = own_class  # "mod.Class" for class units
        self.stubs: Dict[str, str] = {}  # callee qual -> stub name
        self.proxies: Dict[str, str] = {}  # class qual -> proxy name

    def proxy_name(self, cls_qual: str) -> str:
        mod, cname = cls_qual.split(".")
        return cname if mod == self.module else f"_faas_proxy_{mod}_{cname}"

    def rewrite(self, node):
        deps = self.prog.deps

        def fix(node):
            if isinstance(node, n.Call):
                target = deps.target_of(self.module, node)
                if target is None or target in deps.system_callees:
                    return node
                parts = target.split(".")
                if len(parts) == 2:
                    name = "_faas_call_" + self.prog.unit_names[target]
                    self.stubs[target] = name
                    return dataclasses.replace(node, func=n.Name(name, span=node.func.span))
                cls_qual = f"{parts[0]}.{parts[1]}"
                if cls_qual == self.own_class:
                    return node
                self.proxies[cls_qual] = self.proxy_name(cls_qual)
                func = node.func
                is_constructor = parts[2] == "__init__" and (
                    isinstance(func, n.Name) or (isinstance(func, n.Attribute) and isinstance(func.value, n.Name)
                                                 and func.value.id in self.prog.app_modules))
                if is_constructor:
                    return dataclasses.replace(node, func=n.Name(self.proxies[cls_qual], span=func.span))
                return node
            if isinstance(node, n.Import):
                kept = tuple(name for name in node.names if name not in self.prog.app_modules)
                if not kept:
                    return n.Pass(span=node.span)
                return dataclasses.replace(node, names=kept)
            return node

        return map_tree(node, fix)

    def assemble(self, globals_: Sequence[Tuple[str, n.Expr]], flags: FeatureFlags, body: Sequence[str]) -> str:
        mod = self.prog.deps.modules[self.module]
        system = [name for stmt in mod.tree.body if isinstance(stmt, n.Import)
                  for name in stmt.names if name not in self.prog.app_modules]
        parts = ["import " + ", ".join([RUNTIME, *dict.fromkeys(system)]) + "\n"]
        if globals_:
            parts.append("".join(f"{name} = {emit_expr(init)}\n" for name, init in globals_))
        parts.append(t.prelude(flags))
        for qual, name in self.stubs.items():
            fn = self.prog.definition(qual)
            parts.append(t.stub(name, fn.params, self.prog.unit_names[qual], self.prog.flags(qual), UNIT))
        for cls_qual, name in self.proxies.items():
            parts.append(self.prog.proxy_source(cls_qual, name, UNIT))
        parts.extend(body)
        return "\n".join(parts)

    def dependencies(self) -> Tuple[str, ...]:
        names = [self.prog.unit_names[q] for q in self.stubs]
        for cls_qual in self.proxies:
            names.extend(unit for _, _, unit in self.prog.class_methods(cls_qual))
        return tuple(dict.fromkeys(names))


def _referenced_globals(fns: Sequence[n.FunctionDef], module_globals: Sequence[Tuple[str, n.Expr]]):
    names = [name for name, _ in module_globals]
    wanted: List[str] = []
    for fn in fns:
        f = detect_features(fn, names)
        wanted.extend(f.global_reads)
        wanted.extend(f.global_writes)
    wanted_set = set(wanted)
    return tuple((name, init) for name, init in module_globals if name in wanted_set)


def _finish_unit(unit: FunctionUnit) -> FunctionUnit:
    unit = inject_io_monads(unit)
    violations = check_subset(unit.tree)
    if violations:
        raise TransformError(unit.unit_name, violations[0].span,
                             f"generated unit is outside the subset: {violations[0]}")
    return unit


def _program_for(deps: DependencyMap) -> _Program:
    prog = getattr(deps, "_faas_program", None)
    if prog is None:
        prog = _Program(deps)
        deps._faas_program = prog
    return prog


# -- public transforms -------------------------------------------------------------------

def transform_function(fn: n.FunctionDef, deps: DependencyMap, flags: Optional[FeatureFlags] = None,
                       globals: Optional[Sequence[Tuple[str, n.Expr]]] = None,
                       prog: Optional[_Program] = None) -> Tuple[n.FunctionDef, FunctionUnit]:
    """Client stub plus hosted unit for one module-level function."""
    prog = prog or _program_for(deps)
    owner = prog.owner.get(id(fn))
    if owner is None or owner[1] is not None:
        raise TransformError("?", fn.span, f"{fn.name} is not a module-level function of the program")
    module = owner[0]
    qual = f"{module}.{fn.name}"
    unit_name = prog.unit_names.get(qual)
    if unit_name is None:
        raise TransformError(module, fn.span, f"{qual} is not reachable from the entry point")
    flags = flags if flags is not None else prog.flags(qual)
    module_globals = globals if globals is not None else prog.module_globals(module)
    replicated = _referenced_globals([fn], module_globals)

    builder = _UnitBuilder(prog, module, None)
    body = builder.rewrite(fn)
    source = builder.assemble(replicated, flags, [emit(body), t.function_handler(fn.name, len(fn.params), flags)])
    unit = FunctionUnit(unit_name, HANDLER, source, prog.config(unit_name), replicated, flags, qual,
                        builder.dependencies())
    stub = parse(t.stub(fn.name, fn.params, unit_name, flags, CLIENT)).body[0]
    return stub, _finish_unit(unit)


def transform_class(cls: n.ClassDef, deps: DependencyMap,
                    prog: Optional[_Program] = None) -> Tuple[n.ClassDef, List[FunctionUnit]]:
    """Client proxy plus one unit per method and one for the constructor."""
    prog = prog or _program_for(deps)
    owner = prog.owner.get(id(cls))
    if owner is None:
        raise TransformError("?", cls.span, f"class {cls.name} is not part of the program")
    module = owner[0]
    cls_qual = f"{module}.{cls.name}"
    for m in _methods(cls):
        if m.name == REMOTE_INIT:
            raise TransformError(module, m.span, f"class {cls.name} already defines {REMOTE_INIT}")
    flags = prog.class_flags(cls_qual)
    methods = _methods(cls)
    replicated = _referenced_globals(methods, prog.module_globals(module))

    builder = _UnitBuilder(prog, module, cls_qual)
    init = _find_init(cls)
    recv = init.params[0] if init is not None else "self"
    init_args = list(init.params[1:]) if init is not None else []
    members = [t.define("__init__", [recv, *init_args], [f"{recv}.{REMOTE_INIT}({', '.join(init_args)})"])]
    if init is None:
        members.append(t.define(REMOTE_INIT, ["self"], ["pass"]))
    for m in methods:
        rewritten = builder.rewrite(m)
        if m.name == "__init__":
            rewritten = dataclasses.replace(rewritten, name=REMOTE_INIT)
        members.append(emit(rewritten))
    class_text = f"class {cls.name}:\n" + t.indent("\n".join(members))
    source = builder.assemble(replicated, flags, [class_text, t.method_handler(cls.name, flags)])
    deps_names = builder.dependencies()

    units: List[FunctionUnit] = []
    for mname, _, unit_name in prog.class_methods(cls_qual):
        qual = f"{cls_qual}.{'__init__' if mname == REMOTE_INIT else mname}"
        units.append(_finish_unit(FunctionUnit(unit_name, HANDLER, source, prog.config(unit_name), replicated,
                                               flags, qual, deps_names)))
    proxy = parse(prog.proxy_source(cls_qual, cls.name, CLIENT)).body[0]
    return proxy, units


def proxy_spec(cls: n.ClassDef, module: str = "") -> ProxySpec:
    names = [REMOTE_INIT] + [m.name for m in _methods(cls) if m.name != "__init__"]
    return ProxySpec(cls.name, tuple(names), module)


def rewrite_globals_and_main(module: SourceModule, units: Sequence[FunctionUnit]) -> RewrittenModule:
    """Client-side module: runtime import, stubs and proxies, everything else verbatim.

    Functions and classes with a unit in ``units`` are replaced; globals,
    unreachable definitions and the main guard are kept as they were.
    """
    by_qual = {u.qualname: u for u in units}
    body: List[str] = [f"import {RUNTIME}\n"]
    for stmt in module.tree.body:
        if isinstance(stmt, n.FunctionDef) and f"{module.name}.{stmt.name}" in by_qual:
            unit = by_qual[f"{module.name}.{stmt.name}"]
            body.append(t.stub(stmt.name, stmt.params, unit.unit_name, unit.io_flags, CLIENT))
        elif isinstance(stmt, n.ClassDef) and f"{module.name}.{stmt.name}.__init__" in by_qual:
            init = _find_init(stmt)
            init_params = init.params if init is not None else ("self",)
            entries = []
            for name in proxy_spec(stmt).method_names:
                qual = f"{module.name}.{stmt.name}.{'__init__' if name == REMOTE_INIT else name}"
                params = init_params if name == REMOTE_INIT else next(
                    m.params for m in _methods(stmt) if m.name == name)
                entries.append((name, params, by_qual[qual].unit_name))
            flags = by_qual[f"{module.name}.{stmt.name}.__init__"].io_flags
            body.append(t.proxy_class(stmt.name, stmt.name, init_params, entries, flags, CLIENT))
        else:
            body.append(emit(stmt))
    return RewrittenModule(module.name, emit(parse("\n".join(body))))


def inject_io_monads(unit: FunctionUnit) -> FunctionUnit:
    """Route print/input in a unit through its stdout monad and stdin queue.

    ``print(a, b)`` appends ``str(a) + " " + str(b)`` and a newline to the
    unit-level stdout string; ``input(p)`` writes the prompt and takes the
    next line of the event-supplied stdin list.  Idempotent.
    """
    tree = unit.tree
    found = {"print": False, "input": False}

    def fix(node):
        if isinstance(node, n.Call) and isinstance(node.func, n.Name) and node.func.id in found:
            kind = node.func.id
            found[kind] = True
            if kind == "print":
                pieces = [n.Call(n.Name("str"), (a,)) for a in node.args]
                arg: n.Expr = pieces[0] if pieces else n.StrLit("")
                for piece in pieces[1:]:
                    arg = n.BinOp(n.BinOp(arg, "+", n.StrLit(" ")), "+", piece)
                return n.Call(n.Name("_faas_print"), (arg,), span=node.span)
            arg = n.Call(n.Name("str"), node.args) if node.args else n.StrLit("")
            return n.Call(n.Name("_faas_input"), (arg,), span=node.span)
        return node

    tree = map_tree(tree, fix)
    defined = {s.name for s in tree.body if isinstance(s, n.FunctionDef)}
    assigned = {s.target.id for s in tree.body if isinstance(s, n.Assign) and isinstance(s.target, n.Name)}
    extra_defs: List[n.Stmt] = []
    extra_globals: List[n.Stmt] = []
    if found["print"] and "_faas_print" not in defined:
        extra_defs.extend(parse(t.PRINT_DEF).body)
    if found["input"] and "_faas_input" not in defined:
        extra_defs.extend(parse(t.INPUT_DEF).body)
        if "_faas_stdin" not in assigned:
            extra_globals.extend(parse("_faas_stdin = []\n_faas_stdin_pos = 0\n").body)
    body = list(tree.body)
    if extra_globals:
        at = next(i for i, s in enumerate(body) if isinstance(s, n.Assign) and s.target.id == "_faas_stdout")
        body[at + 1:at + 1] = extra_globals
    if extra_defs:
        at = next(i for i, s in enumerate(body) if isinstance(s, n.FunctionDef) and s.name == "_faas_write")
        body[at + 1:at + 1] = extra_defs
    source = emit(n.Module(tuple(body)))
    if source == unit.source:
        return unit
    return dataclasses.replace(unit, source=source)


def transform_program(entry: SourceModule, options: Optional[TransformOptions] = None,
                      loader=None) -> TransformResult:
    """Analyze ``entry`` and transform every reachable application function and class.

    The wall-clock time of analysis plus generation is reported as
    ``elapsed_ms`` (the fixed transformation cost L).  The entry module's
    rewritten form comes first in ``modules``.
    """
    options = options or TransformOptions()
    start = time.perf_counter()
    if loader is None:
        loader = ModuleLoader(options.paths, preloaded={entry.name: entry})
    deps = build_dependency_map(entry, loader)
    _check_reserved(deps)
    prog = _Program(deps, options)
    deps._faas_program = prog
    _check_arity(prog)

    units: List[FunctionUnit] = []
    modules: List[RewrittenModule] = []
    for name, mod in deps.modules.items():
        mod_units: List[FunctionUnit] = []
        for stmt in mod.tree.body:
            if isinstance(stmt, n.FunctionDef) and f"{name}.{stmt.name}" in deps.nodes:
                mod_units.append(transform_function(stmt, deps, prog=prog)[1])
            elif isinstance(stmt, n.ClassDef) and f"{name}.{stmt.name}" in deps.classes:
                mod_units.extend(transform_class(stmt, deps, prog=prog)[1])
        modules.append(rewrite_globals_and_main(mod, mod_units))
        units.extend(mod_units)
    elapsed = (time.perf_counter() - start) * 1000.0
    return TransformResult(modules, units, elapsed, deps)


__all__ = [
    "FunctionUnit", "ProxySpec", "RewrittenModule", "TransformError", "TransformOptions", "TransformResult",
    "inject_io_monads", "map_tree", "proxy_spec", "rewrite_globals_and_main", "transform_class",
    "transform_function", "transform_program",
]
