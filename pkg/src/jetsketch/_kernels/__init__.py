"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy
backend is the fallback and the reference.  Set JETSKETCH_BACKEND to
"python" or "compiled" to force a choice (forcing "compiled" raises if
the extension is missing).
"""

import os

from . import py_backend

_forced = os.environ.get("JETSKETCH_BACKEND", "").strip().lower()

if _forced == "python":
    backend = py_backend
elif _forced == "compiled":
    from . import _jetcore as backend
else:
    try:
        from . import _jetcore as backend
    except ImportError:
        backend = py_backend


def backend_name():
    return backend.NAME
