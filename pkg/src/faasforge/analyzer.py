"""Static dependency analysis across modules.

Builds the caller -> callee map reachable from a program's main guard,
classifies imported modules as application or system scope, and detects
per-function features (print/input use, global reads and writes).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .interpreter.builtins import BUILTIN_NAMES, SYSTEM_MODULES
from .interpreter._walk import local_names
from .syntax import SourceModule, SubsetViolation, check_subset
from .syntax import nodes as n

MAIN = "__main__"
APPLICATION = "application"
SYSTEM = "system"


class AnalysisError(Exception):
    """Static analysis failed; carries the module name and violations."""

    def __init__(self, module: str, violations: Sequence[SubsetViolation]):
        self.module = module
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(f"{module}: {detail}")


@dataclass(frozen=True)
class ModuleScope:
    name: str
    scope: str


@dataclass(frozen=True)
class FeatureFlags:
    uses_print: bool = False
    uses_input: bool = False
    global_reads: Tuple[str, ...] = ()
    global_writes: Tuple[str, ...] = ()

    def merge(self, other: "FeatureFlags") -> "FeatureFlags":
        return FeatureFlags(
            self.uses_print or other.uses_print,
            self.uses_input or other.uses_input,
            _ordered_union(self.global_reads, other.global_reads),
            _ordered_union(self.global_writes, other.global_writes),
        )


def _ordered_union(a: Iterable[str], b: Iterable[str]) -> Tuple[str, ...]:
    return tuple(dict.fromkeys([*a, *b]))


@dataclass
class DependencyMap:
    nodes: Set[str] = field(default_factory=set)
    edges: Dict[Tuple[str, str], List[n.Span]] = field(default_factory=dict)
    entry: str = MAIN
    scopes: Dict[str, ModuleScope] = field(default_factory=dict)
    modules: Dict[str, SourceModule] = field(default_factory=dict)
    classes: Set[str] = field(default_factory=set)
    system_callees: Set[str] = field(default_factory=set)
    # (module, span offset, span length) of each resolved call -> callee id
    call_targets: Dict[Tuple[str, int, int], str] = field(default_factory=dict)

    @property
    def edge_pairs(self) -> Set[Tuple[str, str]]:
        return set(self.edges)

    def add_edge(self, caller: str, callee: str, span: n.Span):
        self.edges.setdefault((caller, callee), []).append(span)

    def target_of(self, module: str, call: n.Call) -> Optional[str]:
        return self.call_targets.get((module, call.span.offset, call.span.length))

    def callees(self, caller: str) -> List[str]:
        """Application-scope callees of ``caller`` in first-call order."""
        return [c for (a, c) in self.edges if a == caller and c not in self.system_callees]

    def application_modules(self) -> List[str]:
        return [name for name, s in self.scopes.items() if s.scope == APPLICATION]


class ModuleLoader:
    """Resolves ``<path>/<name>.py`` inside the project search paths."""

    def __init__(self, paths: Sequence = (), preloaded: Optional[Dict[str, SourceModule]] = None):
        self.paths = [Path(p) for p in paths]
        self.cache: Dict[str, SourceModule] = dict(preloaded or {})

    def __call__(self, name: str) -> Optional[SourceModule]:
        if name in self.cache:
            return self.cache[name]
        for base in self.paths:
            candidate = base / f"{name}.py"
            if candidate.is_file():
                module = SourceModule.from_path(candidate)
                self.cache[name] = module
                return module
        return None

    def add(self, module: SourceModule):
        self.cache[module.name] = module


# -- features -----------------------------------------------------------------

def detect_features(fn: n.FunctionDef, module_globals: Optional[Iterable[str]] = None) -> FeatureFlags:
    """Scan a function body for print/input calls and global variable use.

    With ``module_globals`` (the module's top-level variable names) reads are
    restricted to those names; otherwise every non-local name that is not a
    builtin and not used only as a call target counts as a global read.
    """
    local = local_names(fn)
    known = set(module_globals) if module_globals is not None else None
    declared: List[str] = []
    uses_print = uses_input = False
    reads: List[str] = []
    writes: List[str] = []
    callee_heads: Set[int] = set()

    for node in _walk_body(fn.body):
        if isinstance(node, n.GlobalDecl):
            declared.extend(node.names)
        elif isinstance(node, n.Call):
            head = node.func
            while isinstance(head, n.Attribute):
                head = head.value
            callee_heads.add(id(head))
            if isinstance(node.func, n.Name):
                if node.func.id == "print":
                    uses_print = True
                elif node.func.id == "input":
                    uses_input = True

    for node in _walk_body(fn.body):
        if isinstance(node, n.Name) and node.id not in local:
            name = node.id
            if known is not None:
                if name in known:
                    reads.append(name)
            elif id(node) not in callee_heads and name not in BUILTIN_NAMES:
                reads.append(name)
        elif isinstance(node, (n.Assign, n.AugAssign)) and isinstance(node.target, n.Name):
            if node.target.id in declared:
                writes.append(node.target.id)
        elif isinstance(node, n.ForRange) and node.var in declared:
            writes.append(node.var)

    return FeatureFlags(uses_print, uses_input, tuple(dict.fromkeys(reads)), tuple(dict.fromkeys(writes)))


def _walk_body(body: Sequence[n.Stmt]):
    for stmt in body:
        yield from n.walk(stmt)


def collect_globals(module: SourceModule) -> List[Tuple[str, n.Expr]]:
    """Top-level plain-name assignments, first-appearance order, last value wins."""
    found: Dict[str, n.Expr] = {}
    for stmt in module.tree.body:
        if isinstance(stmt, n.Assign) and isinstance(stmt.target, n.Name):
            found[stmt.target.id] = stmt.value
    return list(found.items())


# -- dependency map -------------------------------------------------------------

@dataclass
class _ModuleInfo:
    module: SourceModule
    functions: Dict[str, n.FunctionDef]
    classes: Dict[str, n.ClassDef]
    imports: Dict[str, str]  # imported name -> scope
    global_names: Set[str]


class _Analysis:
    def __init__(self, loader: Callable[[str], Optional[SourceModule]]):
        self.loader = loader
        self.infos: Dict[str, _ModuleInfo] = {}
        self.dmap = DependencyMap()
        self.errors: Dict[str, List[SubsetViolation]] = {}

    def fail(self, module: str, node: n.Node, construct: str, message: str):
        self.errors.setdefault(module, []).append(SubsetViolation(node.span, construct, message))

    def info(self, module: SourceModule) -> _ModuleInfo:
        existing = self.infos.get(module.name)
        if existing is not None:
            return existing
        violations = check_subset(module.tree)
        if violations:
            raise AnalysisError(module.name, violations)
        functions: Dict[str, n.FunctionDef] = {}
        classes: Dict[str, n.ClassDef] = {}
        for stmt in module.tree.body:
            if isinstance(stmt, n.FunctionDef):
                functions[stmt.name] = stmt
            elif isinstance(stmt, n.ClassDef):
                classes[stmt.name] = stmt
        info = _ModuleInfo(module, functions, classes, {}, {name for name, _ in collect_globals(module)})
        self.infos[module.name] = info
        self.dmap.modules[module.name] = module
        self.dmap.scopes[module.name] = ModuleScope(module.name, APPLICATION)
        for node in n.walk(module.tree):
            if isinstance(node, n.Import):
                for name in node.names:
                    info.imports[name] = self.resolve_import(module.name, name, node)
        return info

    def resolve_import(self, importer: str, name: str, node: n.Import) -> str:
        if name in self.infos:
            return APPLICATION
        if name in SYSTEM_MODULES:
            self.dmap.scopes.setdefault(name, ModuleScope(name, SYSTEM))
            return SYSTEM
        target = self.loader(name)
        if target is None:
            self.fail(importer, node, "unresolved import", f"module {name!r} is neither in the project nor a system module")
            return SYSTEM
        self.info(target)
        return APPLICATION

    def run(self, entry: SourceModule) -> DependencyMap:
        self.info(entry)
        self.dmap.entry = MAIN
        guard_body: List[n.Stmt] = []
        for stmt in entry.tree.body:
            if isinstance(stmt, n.MainGuard):
                guard_body.extend(stmt.body)
        worklist: List[Tuple[str, str, Optional[str], Sequence[str], Sequence[n.Stmt]]] = [
            (MAIN, entry.name, None, (), guard_body)
        ]
        seen: Set[str] = {MAIN}
        while worklist:
            qual, modname, clsname, params, body = worklist.pop(0)
            for callee in self.scan(qual, modname, clsname, params, body):
                if callee in seen:
                    continue
                seen.add(callee)
                worklist.extend(self.expand(callee))
        if self.errors:
            module, violations = next(iter(self.errors.items()))
            raise AnalysisError(module, sorted(violations, key=lambda v: v.span.offset))
        return self.dmap

    def expand(self, qual: str):
        """Schedule the bodies a newly reached callee makes reachable."""
        parts = qual.split(".")
        modname = parts[0]
        info = self.infos[modname]
        if len(parts) == 2 and parts[1] in info.functions:
            fn = info.functions[parts[1]]
            self.dmap.nodes.add(qual)
            return [(qual, modname, None, fn.params, fn.body)]
        clsname = parts[1]
        cls_qual = f"{modname}.{clsname}"
        if cls_qual in self.dmap.classes:
            return []
        self.dmap.classes.add(cls_qual)
        todo = []
        # a class without __init__ still has an (empty) constructor node
        self.dmap.nodes.add(f"{cls_qual}.__init__")
        for member in info.classes[clsname].methods:
            if isinstance(member, n.FunctionDef):
                mq = f"{cls_qual}.{member.name}"
                self.dmap.nodes.add(mq)
                todo.append((mq, modname, clsname, member.params, member.body))
        return todo

    def class_target(self, modname: str, clsname: str) -> str:
        return f"{modname}.{clsname}.__init__"

    def scan(self, qual, modname, clsname, params, body) -> List[str]:
        info = self.infos[modname]
        if qual == MAIN:
            local: Set[str] = set()
        else:
            local = set(local_names(n.FunctionDef("", tuple(params), tuple(body))))
        var_classes = self.constructor_vars(modname, body)
        found: List[str] = []

        def class_of(expr: n.Expr) -> Optional[Tuple[str, str]]:
            if isinstance(expr, n.Name):
                if clsname is not None and params and expr.id == params[0]:
                    return (modname, clsname)
                return var_classes.get(expr.id)
            if isinstance(expr, n.Call):
                return self.constructor_class(modname, expr, local)
            return None

        def visit(node: n.Node, callee_pos: bool = False):
            if isinstance(node, n.Call):
                target = self.resolve_call(qual, modname, node, local, class_of)
                if target is not None:
                    self.dmap.add_edge(qual, target, node.span)
                    self.dmap.call_targets[(modname, node.span.offset, node.span.length)] = target
                    if target not in self.dmap.system_callees:
                        found.append(target)
                if isinstance(node.func, n.Attribute) and not isinstance(node.func.value, n.Name):
                    visit(node.func.value)
                for arg in node.args:
                    visit(arg)
                return
            if isinstance(node, n.Name) and not callee_pos and node.id not in local:
                if node.id in info.functions or node.id in info.classes:
                    self.fail(modname, node, "function reference",
                              f"{node.id!r} is used as a value; only direct calls can be transformed")
                elif info.imports.get(node.id) == APPLICATION:
                    self.fail(modname, node, "module reference",
                              f"application module {node.id!r} can only be used for direct calls")
                return
            if isinstance(node, n.Attribute) and isinstance(node.value, n.Name):
                if node.value.id not in local and info.imports.get(node.value.id) == APPLICATION:
                    self.fail(modname, node, "cross-module attribute",
                              "only functions and classes of other application modules can be used")
                    return
            for child in n.iter_children(node):
                visit(child)

        for stmt in body:
            visit(stmt)
        return found

    def constructor_class(self, modname: str, call: n.Call, local: Set[str]) -> Optional[Tuple[str, str]]:
        info = self.infos[modname]
        func = call.func
        if isinstance(func, n.Name) and func.id not in local and func.id in info.classes:
            return (modname, func.id)
        if (
            isinstance(func, n.Attribute)
            and isinstance(func.value, n.Name)
            and func.value.id not in local
            and info.imports.get(func.value.id) == APPLICATION
        ):
            other = self.infos.get(func.value.id)
            if other is not None and func.attr in other.classes:
                return (func.value.id, func.attr)
        return None

    def constructor_vars(self, modname: str, body: Sequence[n.Stmt]) -> Dict[str, Tuple[str, str]]:
        """Variables assigned only ever from constructor calls of one class."""
        seen: Dict[str, Optional[Tuple[str, str]]] = {}
        for node in _walk_body(body):
            if isinstance(node, (n.Assign, n.AugAssign)) and isinstance(node.target, n.Name):
                name = node.target.id
                cls = None
                if isinstance(node, n.Assign) and isinstance(node.value, n.Call):
                    cls = self.constructor_class(modname, node.value, set())
                if name in seen and seen[name] != cls:
                    seen[name] = None
                else:
                    seen[name] = cls
            elif isinstance(node, n.ForRange):
                seen[node.var] = None
        return {k: v for k, v in seen.items() if v is not None}

    def resolve_call(self, qual, modname, call: n.Call, local, class_of) -> Optional[str]:
        info = self.infos[modname]
        func = call.func
        if isinstance(func, n.Name):
            name = func.id
            if name in local:
                self.fail(modname, call, "call through variable", f"{name!r} is a local variable, not a function")
                return None
            if name in info.functions:
                return f"{modname}.{name}"
            if name in info.classes:
                return self.class_target(modname, name)
            if name in BUILTIN_NAMES:
                return None
            if name in info.imports:
                self.fail(modname, call, "call through variable", f"module {name!r} is not callable")
                return None
            self.fail(modname, call, "unresolved call target", f"{name!r} is not a known function")
            return None
        if isinstance(func, n.Attribute):
            base = func.value
            if isinstance(base, n.Name) and base.id not in local and base.id in info.imports:
                target_mod = base.id
                if info.imports[target_mod] == SYSTEM:
                    callee = f"{target_mod}.{func.attr}"
                    self.dmap.system_callees.add(callee)
                    return callee
                other = self.infos[target_mod]
                if func.attr in other.functions:
                    return f"{target_mod}.{func.attr}"
                if func.attr in other.classes:
                    return self.class_target(target_mod, func.attr)
                self.fail(modname, call, "unresolved call target", f"module {target_mod!r} has no function {func.attr!r}")
                return None
            cls = class_of(base)
            if cls is not None:
                cmod, cname = cls
                methods = {m.name for m in self.infos[cmod].classes[cname].methods if isinstance(m, n.FunctionDef)}
                if func.attr in methods:
                    return f"{cmod}.{cname}.{func.attr}"
                self.fail(modname, call, "unresolvable method call", f"class {cname!r} has no method {func.attr!r}")
                return None
            self.fail(modname, call, "unresolvable method call",
                      "method calls need a receiver that is self or a constructor result")
            return None
        self.fail(modname, call, "call through expression", "only named functions and methods can be called")
        return None


def build_dependency_map(entry: SourceModule, loader: Optional[Callable[[str], Optional[SourceModule]]] = None) -> DependencyMap:
    """Map every function reachable from ``entry``'s main guard.

    System-module callees are recorded as leaf edges and never expanded.
    Raises :class:`AnalysisError` on subset violations, unresolvable imports
    and calls that cannot be resolved statically.
    """
    if loader is None:
        loader = ModuleLoader()
    return _Analysis(loader).run(entry)
