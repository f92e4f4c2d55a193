"""Text templates for stubs, proxies, handlers and the IO monad prelude.

Generated text is always parsed and re-emitted, so layout here only has to
be valid, not canonical.
"""
from __future__ import annotations

import json
from typing import List, Optional, Sequence, Tuple

from ..analyzer import FeatureFlags

RUNTIME = "faas_runtime"
HANDLER = "lambda_handler"
REMOTE_INIT = "__remote__init__"
RESERVED_PREFIX = "_faas"
CLIENT, UNIT = "client", "unit"

WRITE_DEF = '''def _faas_write(text):
    global _faas_stdout
    _faas_stdout = _faas_stdout + text
'''

PRINT_DEF = '''def _faas_print(text):
    _faas_write(text + "\\n")
'''

INPUT_DEF = '''def _faas_input(prompt):
    global _faas_stdin_pos
    _faas_write(prompt)
    _faas_line = faas_runtime.stdin_take(_faas_stdin, _faas_stdin_pos)
    _faas_stdin_pos += 1
    return _faas_line
'''


def q(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def indent(text: str, levels: int = 1) -> str:
    pad = "    " * levels
    return "".join(pad + line if line.strip() else line for line in text.splitlines(True))


def define(name: str, params: Sequence[str], body: Sequence[str]) -> str:
    lines = [f"def {name}({', '.join(params)}):"]
    lines.extend("    " + line for line in (body or ["pass"]))
    return "\n".join(lines) + "\n"


def forward_body(unit_name: str, args: Sequence[str], flags: FeatureFlags, side: str,
                 method: Optional[Tuple[str, str, str]] = None) -> List[str]:
    """Body of a stub or proxy method that ships its call to ``unit_name``.

    ``method`` is ``(receiver, class name, method name)`` for proxy methods,
    whose state travels with the call and is replaced by the returned state.
    """
    client = side == CLIENT
    lines: List[str] = []
    if flags.uses_input and not client:
        lines.append("global _faas_stdin_pos")
    fields = [f'"args": [{", ".join(args)}]']
    if flags.uses_input:
        rest = "faas_runtime.stdin_rest()" if client else "faas_runtime.tail(_faas_stdin, _faas_stdin_pos)"
        fields.append(f'"stdin": {rest}')
    if method is not None:
        recv, cname, mname = method
        fields.append(f'"state": faas_runtime.get_state({recv})')
        fields.append(f'"classname": {q(cname)}')
        fields.append(f'"method": {q(mname)}')
    lines.append(f"_faas_r = faas_runtime.invoke({q(unit_name)}, {{{', '.join(fields)}}})")
    if method is not None:
        lines.append(f'faas_runtime.set_state({method[0]}, _faas_r["state"], {q(method[1])})')
    if flags.uses_print or flags.uses_input:  # input prompts land in stdout too
        lines.append('faas_runtime.emit(_faas_r["stdout"])' if client else '_faas_write(_faas_r["stdout"])')
    if flags.uses_input:
        lines.append('faas_runtime.stdin_consume(_faas_r["consumed"])' if client
                     else '_faas_stdin_pos += _faas_r["consumed"]')
    lines.append('return _faas_r["return"]')
    return lines


def stub(name: str, params: Sequence[str], unit_name: str, flags: FeatureFlags, side: str) -> str:
    return define(name, params, forward_body(unit_name, params, flags, side))


def proxy_class(name: str, classname: str, init_params: Sequence[str],
                methods: Sequence[Tuple[str, Sequence[str], str]], flags: FeatureFlags, side: str) -> str:
    """Client-side stand-in for a class.

    ``methods`` lists ``(method name, params including receiver, unit name)``;
    the constructor entry uses the name ``__remote__init__``.
    """
    recv = init_params[0] if init_params else "self"
    init_args = list(init_params[1:])
    parts = [define("__init__", [recv, *init_args], [f"{recv}.{REMOTE_INIT}({', '.join(init_args)})"])]
    for mname, params, unit_name in methods:
        receiver, args = params[0], list(params[1:])
        parts.append(define(mname, params, forward_body(unit_name, args, flags, side, (receiver, classname, mname))))
    return f"class {name}:\n" + indent("\n".join(parts))


def prelude(flags: FeatureFlags) -> str:
    lines = ['_faas_stdout = ""']
    if flags.uses_input:
        lines += ["_faas_stdin = []", "_faas_stdin_pos = 0"]
    return "\n".join(lines) + "\n\n" + WRITE_DEF


def _handler_globals(flags: FeatureFlags) -> List[str]:
    names = ["_faas_stdout"] + (["_faas_stdin", "_faas_stdin_pos"] if flags.uses_input else [])
    lines = [f"global {', '.join(names)}", '_faas_stdout = ""']
    if flags.uses_input:
        lines += ['_faas_stdin = event["stdin"]', "_faas_stdin_pos = 0"]
    return lines


def _response(flags: FeatureFlags, state: bool) -> str:
    fields = ['"state": faas_runtime.get_state(_faas_self)'] if state else []
    fields += ['"return": _faas_ret', '"stdout": _faas_stdout']
    if flags.uses_input:
        fields.append('"consumed": _faas_stdin_pos')
    return "return {" + ", ".join(fields) + "}"


def function_handler(fn_name: str, arity: int, flags: FeatureFlags) -> str:
    args = ", ".join(f'event["args"][{i}]' for i in range(arity))
    body = _handler_globals(flags) + [f"_faas_ret = {fn_name}({args})", _response(flags, False)]
    return define(HANDLER, ["event", "context"], body)


def method_handler(class_name: str, flags: FeatureFlags) -> str:
    body = _handler_globals(flags) + [
        f'_faas_self = faas_runtime.restore({class_name}, event["state"])',
        '_faas_ret = faas_runtime.call_method(_faas_self, event["method"], event["args"])',
        _response(flags, True),
    ]
    return define(HANDLER, ["event", "context"], body)
