"""Kernel backend selection.

The compiled extension (mbp._core) is preferred; the pure-Python module
(mbp._pycore) is the fallback and the behavioural reference. Set
MBP_BACKEND=python or MBP_BACKEND=compiled to force one.
"""
from __future__ import annotations

import os

_forced = os.environ.get("MBP_BACKEND")

if _forced == "python":
    from . import _pycore as core
elif _forced == "compiled":
    from . import _core as core  # type: ignore[no-redef]
elif _forced:
    raise RuntimeError(f"MBP_BACKEND must be 'python' or 'compiled', got {_forced!r}")
else:
    try:
        from . import _core as core  # type: ignore[no-redef]
    except ImportError:
        from . import _pycore as core

BACKEND = core.BACKEND_NAME
