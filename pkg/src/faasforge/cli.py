"""Command-line front end.

    faasforge [--debug] [--local] [--endpoint URL] [--outdir DIR] [--path DIR]... [--bench LABEL] FILE...
    faasforge serve [--bind HOST:PORT]
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .analyzer import AnalysisError
from .emulator import DEFAULT_BIND, ENDPOINT_ENV, gateway_serve
from .interpreter import BudgetExceeded, RuntimeFault
from .packager import PackagingError, write_debug_outputs
from .runtime import DispatchError, HttpDispatcher, LocalDispatcher, execute_program
from .syntax import SourceModule, SyntaxFault
from .transformer import TransformError, TransformOptions, transform_program

EXIT_OK, EXIT_VIOLATION, EXIT_FAILURE = 0, 1, 2

log = logging.getLogger("faasforge")


@dataclass
class CliOptions:
    files: List[str]
    debug: bool = False
    local: bool = False
    endpoint: Optional[str] = None
    outdir: str = "./out"
    paths: List[str] = field(default_factory=list)
    bench: Optional[str] = None

    @property
    def mode(self) -> str:
        if self.debug:
            return "debug"
        return "production" if self.endpoint and not self.local else "local"


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="faasforge", description="Transform programs into hosted-function units.")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--debug", action="store_true", help="write generated files only; execute nothing")
    p.add_argument("--local", action="store_true", help="run units in-process instead of on an endpoint")
    p.add_argument("--endpoint", help=f"emulator URL (default from ${ENDPOINT_ENV})")
    p.add_argument("--outdir", default="./out")
    p.add_argument("--path", action="append", default=[], dest="paths", metavar="DIR",
                   help="extra application module search path (repeatable)")
    p.add_argument("--bench", metavar="LABEL", help='time an invocation such as "fib(20)" and print a report')
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _serve_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="faasforge serve", description="Run the local FaaS emulator.")
    p.add_argument("--bind", default=None, help=f"HOST:PORT (default ${ENDPOINT_ENV} or {DEFAULT_BIND})")
    return p


def _print_violations(exc: Exception, path: str):
    violations = getattr(exc, "violations", None)
    if violations:
        module = getattr(exc, "module", path)
        for v in violations:
            print(f"{module}:{v.span.line}:{v.span.column}: {v.construct}: {v.message}", file=sys.stderr)
    else:
        print(f"{path}: {exc}", file=sys.stderr)


def _serve(argv: Sequence[str]) -> int:
    args = _serve_parser().parse_args(argv)
    handle = gateway_serve(args.bind, background=False)
    print(f"emulator listening on {handle.url}", flush=True)
    try:
        handle.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        handle.server.server_close()
    return EXIT_OK


def _run_file(path: str, opts: CliOptions, repetitions: int, fmt: str) -> int:
    entry_path = Path(path)
    if not entry_path.is_file():
        print(f"{path}: file not found", file=sys.stderr)
        return EXIT_FAILURE
    paths = [str(entry_path.parent), *opts.paths]
    try:
        entry = SourceModule.from_path(entry_path)
    except SyntaxFault as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION

    if opts.bench:
        from .bench import render_report, run_experiment

        mode = "direct" if opts.debug else ("emulated" if opts.mode == "production" else "local")
        try:
            row = run_experiment(entry, opts.bench, mode, opts.endpoint, repetitions, paths=paths)
        except (AnalysisError, TransformError, SyntaxFault) as exc:
            _print_violations(exc, path)
            return EXIT_VIOLATION
        print(render_report([row], fmt), end="")
        return EXIT_FAILURE if row.failed else EXIT_OK

    options = TransformOptions(mode=opts.mode, endpoint=opts.endpoint, paths=tuple(paths))
    try:
        result = transform_program(entry, options)
    except (AnalysisError, TransformError, SyntaxFault) as exc:
        _print_violations(exc, path)
        return EXIT_VIOLATION
    log.info("transformed %s into %d unit(s) in %.1f ms", path, len(result.units), result.elapsed_ms)

    if opts.debug:
        for written in write_debug_outputs(result.modules, result.units, opts.outdir):
            log.info("wrote %s", written)
        return EXIT_OK

    if opts.mode == "production":
        dispatcher = HttpDispatcher(opts.endpoint, result.units)
    else:
        dispatcher = LocalDispatcher(result.units)
    stdin = sys.stdin.read().splitlines() if not sys.stdin.isatty() else []
    try:
        outcome = execute_program(result, dispatcher, stdin)
    except (RuntimeFault, BudgetExceeded) as exc:
        sys.stdout.write(getattr(exc, "stdout", ""))
        print(f"{path}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (DispatchError, PackagingError) as exc:
        print(f"{path}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    sys.stdout.write(outcome.stdout)
    sys.stdout.flush()
    return EXIT_OK


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "serve":
        return _serve(argv[1:])
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_FAILURE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    endpoint = args.endpoint
    if endpoint is None and not args.local and not args.debug:
        endpoint = os.environ.get(ENDPOINT_ENV)
    if args.debug and args.endpoint:
        print("--debug and --endpoint are mutually exclusive", file=sys.stderr)
        return EXIT_FAILURE
    opts = CliOptions(args.files, args.debug, args.local, endpoint, args.outdir, args.paths, args.bench)
    code = EXIT_OK
    for path in opts.files:
        code = max(code, _run_file(path, opts, args.repetitions, args.format))
    return code


def main() -> None:
    sys.exit(run_cli())
