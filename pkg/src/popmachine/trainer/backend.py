"""Kernel backend selection.

The compiled extension is preferred when importable; POPMACHINE_PURE=1
forces the pure-Python twin. Both expose run_segment and evaluate_greedy
with identical semantics.
"""

from __future__ import annotations

import os

from popmachine.trainer import _qcore_py

if os.environ.get("POPMACHINE_PURE"):
    kernel = _qcore_py
    BACKEND = "pure"
else:
    try:
        from popmachine.trainer import _qcore as _compiled

        kernel = _compiled
        BACKEND = "compiled"
    except ImportError:
        kernel = _qcore_py
        BACKEND = "pure"
