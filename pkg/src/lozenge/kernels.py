"""Picks the compiled transition kernel when available.

Set ``LOZENGE_PURE_PYTHON=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
successors = _kernels_py.successors

if os.environ.get("LOZENGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        successors = _kernels.successors
        BACKEND = "cython"

__all__ = ["successors", "BACKEND"]
