"""Evaluator core: statement execution and expression evaluation.

This module is plain Python.  ``_walk_c.pyx`` textually includes it so the
same source is also built as a compiled extension; :mod:`.backend` picks
whichever is available at import time.
"""
import operator
import time

from ..syntax import nodes as n
from .values import (
    BoundMethod,
    BudgetExceeded,
    ClassValue,
    FunctionValue,
    ModuleValue,
    NativeFunction,
    ObjectInstance,
    RuntimeFault,
)

CHECK_INTERVAL = 1024

_MISSING = object()


def _contains(a, b):
    return a in b


_BINOPS = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "//": operator.floordiv,
    "%": operator.mod,
    "**": operator.pow,
}

_CMPOPS = {
    "==": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "in": _contains,
}

_ARITH_FAULTS = (TypeError, ZeroDivisionError, OverflowError, ValueError, MemoryError)


class _Return:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class Frame:
    __slots__ = ("locals", "localnames", "globals", "modname")

    def __init__(self, locals_, localnames, globals_, modname):
        self.locals = locals_
        self.localnames = localnames
        self.globals = globals_
        self.modname = modname


def local_names(fn):
    """Names bound inside ``fn`` that are local (params + assignments - globals)."""
    declared = set()
    assigned = set(fn.params)
    for node in _walk_stmts(fn.body):
        if isinstance(node, n.GlobalDecl):
            declared.update(node.names)
        elif isinstance(node, (n.Assign, n.AugAssign)):
            if isinstance(node.target, n.Name):
                assigned.add(node.target.id)
        elif isinstance(node, n.ForRange):
            assigned.add(node.var)
        elif isinstance(node, n.Import):
            assigned.update(node.names)
    return frozenset(assigned - declared)


def _walk_stmts(body):
    for stmt in body:
        yield stmt
        if isinstance(stmt, n.If):
            for _, branch in stmt.branches:
                yield from _walk_stmts(branch)
            yield from _walk_stmts(stmt.orelse)
        elif isinstance(stmt, (n.While, n.ForRange, n.MainGuard)):
            yield from _walk_stmts(stmt.body)


def fault(kind, message, node):
    return RuntimeFault(kind, message, getattr(node, "span", None))


class Evaluator:
    """Executes subset trees against native Python values."""

    def __init__(self, builtins, system_modules, loader=None, stdin=()):
        self.builtins = builtins
        self.system_modules = system_modules
        self.loader = loader
        self.modules = {}
        self.out = []
        self.stdin = list(stdin)
        self.stdin_pos = 0
        self.call_count = 0
        self.steps = 0
        self.next_check = CHECK_INTERVAL
        self.max_steps = None
        self.deadline = None
        self.last_value = None
        self.local_cache = {}

    # -- budget --------------------------------------------------------------

    def set_budget(self, max_steps=None, deadline=None):
        self.max_steps = max_steps
        self.deadline = deadline
        self._schedule()

    def _schedule(self):
        nxt = self.steps + CHECK_INTERVAL
        if self.max_steps is not None and self.max_steps + 1 < nxt:
            nxt = self.max_steps + 1
        self.next_check = nxt

    def _tick(self):
        if self.max_steps is not None and self.steps > self.max_steps:
            raise BudgetExceeded(f"step budget of {self.max_steps} exceeded")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall-clock budget exceeded")
        self._schedule()

    # -- io ------------------------------------------------------------------

    def write(self, text):
        self.out.append(text)

    @property
    def stdout(self):
        return "".join(self.out)

    def read_line(self):
        if self.stdin_pos >= len(self.stdin):
            raise RuntimeFault("EOFError", "stdin exhausted")
        line = self.stdin[self.stdin_pos]
        self.stdin_pos += 1
        return line

    # -- modules -------------------------------------------------------------

    def run_module_tree(self, name, tree, as_main):
        namespace = {"__name__": "__main__" if as_main else name}
        module = ModuleValue(name, namespace)
        self.modules[name] = module
        frame = Frame(namespace, None, namespace, name)
        self.exec_block(tree.body, frame)
        return module

    def import_module(self, name, node):
        module = self.modules.get(name)
        if module is not None:
            return module
        module = self.system_modules.get(name)
        if module is not None:
            return module
        source = self.loader(name) if self.loader is not None else None
        if source is None:
            raise fault("ModuleNotFoundError", f"no module named {name!r}", node)
        return self.run_module_tree(name, source.tree, False)

    # -- calls ---------------------------------------------------------------

    def call(self, func, args, node=None):
        t = type(func)
        if t is FunctionValue:
            return self.invoke(func, args, node)
        if t is BoundMethod:
            return self.invoke(func.func, [func.receiver] + list(args), node)
        if t is NativeFunction:
            try:
                return func.fn(self, *args)
            except (RuntimeFault, BudgetExceeded):
                raise
            except RecursionError:
                raise fault("RecursionError", "maximum recursion depth exceeded", node) from None
            except Exception as exc:
                raise fault(type(exc).__name__, str(exc), node) from None
        if t is ClassValue:
            obj = ObjectInstance(func)
            init = func.methods.get("__init__")
            if init is not None:
                if self.invoke(init, [obj] + list(args), node) is not None:
                    raise fault("TypeError", "__init__() should return None", node)
            elif args:
                raise fault("TypeError", f"{func.name}() takes no arguments", node)
            return obj
        raise fault("TypeError", f"'{_type_name(func)}' object is not callable", node)

    def invoke(self, fv, args, node=None):
        params = fv.params
        if len(args) != len(params):
            raise fault(
                "TypeError",
                f"{fv.name}() takes {len(params)} positional arguments but {len(args)} were given",
                node,
            )
        self.call_count += 1
        frame = Frame(dict(zip(params, args)), fv.localnames, fv.module_globals, fv.modname)
        result = self.exec_block(fv.node.body, frame)
        if result is None:
            return None
        return result.value

    # -- statements ----------------------------------------------------------

    def exec_block(self, body, frame):
        for stmt in body:
            self.steps += 1
            if self.steps >= self.next_check:
                self._tick()
            result = _STMT[type(stmt)](self, stmt, frame)
            if result is not None:
                return result
        return None

    def _exec_expr(self, s, frame):
        self.eval(s.value, frame)

    def _exec_assign(self, s, frame):
        value = self.eval(s.value, frame)
        self.store(s.target, value, frame)

    def _exec_augassign(self, s, frame):
        target = s.target
        op = _BINOPS[s.op]
        if type(target) is n.Name:
            current = self._load_name(target, frame)
            self.store(target, self._arith(op, current, self.eval(s.value, frame), s), frame)
        elif type(target) is n.Attribute:
            obj = self.eval(target.value, frame)
            current = self._getattr(obj, target.attr, target)
            value = self._arith(op, current, self.eval(s.value, frame), s)
            self._setattr(obj, target.attr, value, target)
        else:
            container = self.eval(target.value, frame)
            index = self.eval(target.index, frame)
            current = self._getitem(container, index, target)
            value = self._arith(op, current, self.eval(s.value, frame), s)
            self._setitem(container, index, value, target)

    def _exec_return(self, s, frame):
        if s.value is None:
            return _Return(None)
        return _Return(self.eval(s.value, frame))

    def _exec_if(self, s, frame):
        for test, body in s.branches:
            if self.eval(test, frame):
                return self.exec_block(body, frame)
        return self.exec_block(s.orelse, frame)

    def _exec_while(self, s, frame):
        while self.eval(s.test, frame):
            result = self.exec_block(s.body, frame)
            if result is not None:
                return result
        return None

    def _exec_for(self, s, frame):
        args = [self.eval(a, frame) for a in s.args]
        try:
            rng = range(*args)
        except TypeError as exc:
            raise fault("TypeError", str(exc), s) from None
        var = s.var
        local = frame.localnames is not None and var in frame.localnames
        scope = frame.locals if local else frame.globals
        for i in rng:
            scope[var] = i
            result = self.exec_block(s.body, frame)
            if result is not None:
                return result
        return None

    def _exec_nothing(self, s, frame):
        return None

    def _exec_import(self, s, frame):
        for name in s.names:
            self.store_name(name, self.import_module(name, s), frame)

    def _exec_def(self, s, frame):
        fn = FunctionValue(s, frame.modname, f"{frame.modname}.{s.name}", self._locals_of(s), frame.globals)
        self.store_name(s.name, fn, frame)

    def _exec_class(self, s, frame):
        methods = {}
        for member in s.methods:
            if type(member) is n.FunctionDef:
                methods[member.name] = FunctionValue(
                    member, frame.modname, f"{frame.modname}.{s.name}.{member.name}",
                    self._locals_of(member), frame.globals,
                )
        self.store_name(s.name, ClassValue(s.name, f"{frame.modname}.{s.name}", methods), frame)

    def _locals_of(self, fn):
        key = id(fn)
        cached = self.local_cache.get(key)
        if cached is None or cached[0] is not fn:
            cached = (fn, local_names(fn))
            self.local_cache[key] = cached
        return cached[1]

    def _exec_main(self, s, frame):
        if frame.globals.get("__name__") != "__main__":
            return None
        for stmt in s.body:
            self.steps += 1
            if self.steps >= self.next_check:
                self._tick()
            if type(stmt) is n.ExprStmt:
                self.last_value = self.eval(stmt.value, frame)
                continue
            result = _STMT[type(stmt)](self, stmt, frame)
            if result is not None:
                return result
        return None

    def _exec_unsupported(self, s, frame):
        raise fault("SyntaxError", f"{s.construct} is outside the supported subset", s)

    # -- stores --------------------------------------------------------------

    def store_name(self, name, value, frame):
        ln = frame.localnames
        if ln is not None and name in ln:
            frame.locals[name] = value
        else:
            frame.globals[name] = value

    def store(self, target, value, frame):
        t = type(target)
        if t is n.Name:
            self.store_name(target.id, value, frame)
        elif t is n.Attribute:
            self._setattr(self.eval(target.value, frame), target.attr, value, target)
        elif t is n.Subscript:
            container = self.eval(target.value, frame)
            self._setitem(container, self.eval(target.index, frame), value, target)
        else:
            raise fault("SyntaxError", "cannot assign to expression", target)

    def _setattr(self, obj, attr, value, node):
        if type(obj) is not ObjectInstance:
            raise fault("AttributeError", f"'{_type_name(obj)}' object attribute '{attr}' is read-only", node)
        obj.attrs[attr] = value

    def _setitem(self, container, index, value, node):
        try:
            container[index] = value
        except (TypeError, IndexError, KeyError) as exc:
            raise fault(type(exc).__name__, str(exc), node) from None

    # -- expressions ---------------------------------------------------------

    def eval(self, e, frame):
        self.steps += 1
        if self.steps >= self.next_check:
            self._tick()
        return _EXPR[type(e)](self, e, frame)

    def _eval_literal(self, e, frame):
        return e.value

    def _eval_none(self, e, frame):
        return None

    def _eval_list(self, e, frame):
        return [self.eval(x, frame) for x in e.elts]

    def _eval_tuple(self, e, frame):
        return tuple([self.eval(x, frame) for x in e.elts])

    def _eval_map(self, e, frame):
        result = {}
        for k, v in zip(e.keys, e.values):
            key = self.eval(k, frame)
            try:
                result[key] = self.eval(v, frame)
            except TypeError as exc:
                raise fault("TypeError", str(exc), k) from None
        return result

    def _load_name(self, e, frame):
        name = e.id
        ln = frame.localnames
        if ln is not None and name in ln:
            value = frame.locals.get(name, _MISSING)
            if value is _MISSING:
                raise fault("UnboundLocalError", f"local variable '{name}' referenced before assignment", e)
            return value
        value = frame.globals.get(name, _MISSING)
        if value is _MISSING:
            value = self.builtins.get(name, _MISSING)
            if value is _MISSING:
                raise fault("NameError", f"name '{name}' is not defined", e)
        return value

    def _eval_name(self, e, frame):
        return self._load_name(e, frame)

    def _getattr(self, obj, attr, node):
        t = type(obj)
        if t is ObjectInstance:
            attrs = obj.attrs
            if attr in attrs:
                return attrs[attr]
            method = obj.cls.methods.get(attr)
            if method is not None:
                return BoundMethod(obj, method)
            raise fault("AttributeError", f"'{obj.cls.name}' object has no attribute '{attr}'", node)
        if t is ModuleValue:
            value = obj.namespace.get(attr, _MISSING)
            if value is _MISSING:
                raise fault("AttributeError", f"module '{obj.name}' has no attribute '{attr}'", node)
            return value
        raise fault("AttributeError", f"'{_type_name(obj)}' object has no attribute '{attr}'", node)

    def _eval_attribute(self, e, frame):
        return self._getattr(self.eval(e.value, frame), e.attr, e)

    def _getitem(self, container, index, node):
        try:
            return container[index]
        except (TypeError, IndexError, KeyError) as exc:
            raise fault(type(exc).__name__, str(exc), node) from None

    def _eval_subscript(self, e, frame):
        return self._getitem(self.eval(e.value, frame), self.eval(e.index, frame), e)

    def _eval_call(self, e, frame):
        func = self.eval(e.func, frame)
        args = [self.eval(a, frame) for a in e.args]
        return self.call(func, args, e)

    def _arith(self, op, left, right, node):
        try:
            return op(left, right)
        except _ARITH_FAULTS as exc:
            raise fault(type(exc).__name__, str(exc), node) from None

    def _eval_binop(self, e, frame):
        left = self.eval(e.left, frame)
        right = self.eval(e.right, frame)
        return self._arith(_BINOPS[e.op], left, right, e)

    def _eval_unary(self, e, frame):
        value = self.eval(e.operand, frame)
        if e.op == "not":
            return not value
        try:
            return -value
        except TypeError as exc:
            raise fault("TypeError", str(exc), e) from None

    def _eval_compare(self, e, frame):
        left = self.eval(e.left, frame)
        result = True
        for op, comp in zip(e.ops, e.comparators):
            right = self.eval(comp, frame)
            try:
                result = _CMPOPS[op](left, right)
            except TypeError as exc:
                raise fault("TypeError", str(exc), e) from None
            if not result:
                return result
            left = right
        return result

    def _eval_boolop(self, e, frame):
        value = None
        if e.op == "and":
            for v in e.values:
                value = self.eval(v, frame)
                if not value:
                    return value
            return value
        for v in e.values:
            value = self.eval(v, frame)
            if value:
                return value
        return value

    def _eval_unsupported(self, e, frame):
        raise fault("SyntaxError", f"{e.construct} is outside the supported subset", e)


def _type_name(value):
    if type(value) is ObjectInstance:
        return value.cls.name
    if type(value) is FunctionValue:
        return "function"
    if type(value) is ClassValue:
        return "type"
    if type(value) is ModuleValue:
        return "module"
    if value is None:
        return "NoneType"
    return type(value).__name__


_STMT = {
    n.ExprStmt: Evaluator._exec_expr,
    n.Assign: Evaluator._exec_assign,
    n.AugAssign: Evaluator._exec_augassign,
    n.Return: Evaluator._exec_return,
    n.If: Evaluator._exec_if,
    n.While: Evaluator._exec_while,
    n.ForRange: Evaluator._exec_for,
    n.Pass: Evaluator._exec_nothing,
    n.GlobalDecl: Evaluator._exec_nothing,
    n.Import: Evaluator._exec_import,
    n.FunctionDef: Evaluator._exec_def,
    n.ClassDef: Evaluator._exec_class,
    n.MainGuard: Evaluator._exec_main,
    n.Unsupported: Evaluator._exec_unsupported,
}

_EXPR = {
    n.IntLit: Evaluator._eval_literal,
    n.FloatLit: Evaluator._eval_literal,
    n.StrLit: Evaluator._eval_literal,
    n.BoolLit: Evaluator._eval_literal,
    n.NoneLit: Evaluator._eval_none,
    n.ListLit: Evaluator._eval_list,
    n.TupleLit: Evaluator._eval_tuple,
    n.MapLit: Evaluator._eval_map,
    n.Name: Evaluator._eval_name,
    n.Attribute: Evaluator._eval_attribute,
    n.Subscript: Evaluator._eval_subscript,
    n.Call: Evaluator._eval_call,
    n.BinOp: Evaluator._eval_binop,
    n.UnaryOp: Evaluator._eval_unary,
    n.Compare: Evaluator._eval_compare,
    n.BoolOp: Evaluator._eval_boolop,
    n.Unsupported: Evaluator._eval_unsupported,
}
