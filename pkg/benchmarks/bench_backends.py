"""Compare the compiled evaluator core against the pure-Python one.

Each backend runs in its own subprocess (``FAASFORGE_PURE=1`` forces the
pure core) on the same workloads: direct interpretation of fib, and the
transformed fib in local mode where every call crosses a JSON boundary.

    python3 benchmarks/bench_backends.py [--repetitions N] [--x 20]
"""
from __future__ import annotations

import argparse
import json
import os
import statistics
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

_WORKER = r"""
import json, sys, time
from faasforge.interpreter import backend, run_module
from faasforge.bench import invocation_program
from faasforge.runtime import LocalDispatcher, execute_program
from faasforge.syntax import SourceModule
from faasforge.transformer import transform_program

path, label, reps = sys.argv[1], sys.argv[2], int(sys.argv[3])
subject = invocation_program(SourceModule.from_path(path), label)
direct, local = [], []
for _ in range(reps):
    start = time.perf_counter()
    run_module(subject)
    direct.append(time.perf_counter() - start)
    result = transform_program(subject)
    dispatcher = LocalDispatcher(result.units)
    start = time.perf_counter()
    execute_program(result, dispatcher)
    local.append(time.perf_counter() - start)
print(json.dumps({"backend": backend.BACKEND, "direct": direct, "local": local,
                  "invocations": dispatcher.invocations}))
"""


def measure(pure: bool, label: str, reps: int) -> dict:
    env = dict(os.environ)
    env.pop("FAASFORGE_PURE", None)
    if pure:
        env["FAASFORGE_PURE"] = "1"
    proc = subprocess.run([sys.executable, "-c", _WORKER, str(CORPUS / "fib.py"), label, str(reps)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repetitions", type=int, default=3)
    ap.add_argument("--x", type=int, default=20, help="Fibonacci argument")
    args = ap.parse_args(argv)
    label = f"fib({args.x})"

    runs = [measure(False, label, args.repetitions), measure(True, label, args.repetitions)]
    if runs[0]["backend"] != "compiled":
        print("compiled core not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
    print(f"{label}, median of {args.repetitions} runs, {runs[0]['invocations']} invocations in local mode")
    print(f"{'backend':<10}{'direct s':>12}{'local s':>12}")
    medians = {}
    for run in runs:
        d, l = statistics.median(run["direct"]), statistics.median(run["local"])
        medians[run["backend"]] = (d, l)
        print(f"{run['backend']:<10}{d:>12.4f}{l:>12.4f}")
    if set(medians) == {"compiled", "python"}:
        (cd, cl), (pd, pl) = medians["compiled"], medians["python"]
        print(f"{'speedup':<10}{pd / cd:>11.2f}x{pl / cl:>11.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
