"""Shared corpus description and oracle runners for the test-suite."""
from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path
from typing import Dict, List

from faasforge.analyzer import ModuleLoader
from faasforge.interpreter import run_module
from faasforge.runtime import HttpDispatcher, LocalDispatcher, execute_program
from faasforge.syntax import SourceModule
from faasforge.transformer import TransformOptions, transform_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

# entry programs with the stdin lines they consume
PROGRAMS: Dict[str, List[str]] = {
    "fib": [],
    "fibs": [],
    "fibw": [],
    "counter": [],
    "bank": [],
    "greet": ["3", "zed", "bye"],
    "formatting": [],
    "shapes_app": [],
    "empty_main": [],
    "guard_only": [],
    "tally": [],
    "library": [],
}
LIBRARY_MODULES = ("geometry", "textutil")


def load(name: str) -> SourceModule:
    return SourceModule.from_path(CORPUS / f"{name}.py")


def corpus_files() -> List[Path]:
    return sorted(CORPUS.glob("*.py"))


def run_direct(name: str):
    return run_module(load(name), PROGRAMS.get(name, []), loader=ModuleLoader([CORPUS]))


def transform(name: str, mode: str = "local", endpoint=None):
    options = TransformOptions(mode=mode, endpoint=endpoint, paths=(str(CORPUS),))
    return transform_program(load(name), options)


def run_local(name: str):
    result = transform(name)
    dispatcher = LocalDispatcher(result.units)
    return execute_program(result, dispatcher, PROGRAMS.get(name, [])), dispatcher


def run_emulated(name: str, endpoint: str):
    result = transform(name, "production", endpoint)
    dispatcher = HttpDispatcher(endpoint, result.units)
    # start cold: warm instances from an earlier run would carry their globals over
    for unit in result.units:
        dispatcher.client.delete(unit.unit_name)
    return execute_program(result, dispatcher, PROGRAMS.get(name, [])), dispatcher


def run_cpython(name: str) -> str:
    """Run a corpus program under the host Python as an independent oracle."""
    stdin = "".join(line + "\n" for line in PROGRAMS.get(name, []))
    proc = subprocess.run([sys.executable, str(CORPUS / f"{name}.py")], input=stdin, capture_output=True,
                          text=True, cwd=CORPUS, env={**os.environ, "PYTHONHASHSEED": "0"}, timeout=120)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def fib_memo(x: int, memo={1: 1, 2: 1}) -> int:
    if x not in memo:
        memo[x] = fib_memo(x - 1) + fib_memo(x - 2)
    return memo[x]


# criterion number -> (passed, detail); reported in the terminal summary
ACCEPTANCE: Dict[int, tuple] = {}
