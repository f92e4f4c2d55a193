"""Transform programs into hosted-function units and run them on a local FaaS emulator."""
from __future__ import annotations

__version__ = "0.1.0"
