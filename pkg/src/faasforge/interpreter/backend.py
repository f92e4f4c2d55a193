"""Select the evaluator core: compiled extension if built, else pure Python.

Set ``FAASFORGE_PURE=1`` to force the pure-Python core.
"""
from __future__ import annotations

import os
import sys

from . import _walk as _pure

try:
    if os.environ.get("FAASFORGE_PURE"):
        raise ImportError("pure-Python core forced")
    from . import _walk_c as _compiled
except ImportError:
    _compiled = None

core = _compiled if _compiled is not None else _pure
BACKEND = "compiled" if _compiled is not None else "python"
Evaluator = core.Evaluator

# interpreted recursion nests several host frames per call; stubbed calls nest more
if sys.getrecursionlimit() < 8000:
    sys.setrecursionlimit(8000)


def available_backends():
    """Mapping of backend name to core module, for benchmarks and tests."""
    found = {"python": _pure}
    if _compiled is not None:
        found["compiled"] = _compiled
    return found
