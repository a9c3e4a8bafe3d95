"""Kernel backend selection.

The compiled Cython sweeps are used when the extension built and the
problem is 2D/3D; otherwise the vectorized numpy fallback runs. Set
HS_PURE_PYTHON=1 to force the fallback (e.g. for benchmarking).
"""

from __future__ import annotations

import os

from . import numpy_backend

_compiled = None
if os.environ.get("HS_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _sweeps as _compiled
    except ImportError:
        _compiled = None


def backend_for(ndim: int):
    """Kernel module handling arrays of the given dimensionality."""
    if _compiled is not None and ndim in (2, 3):
        return _compiled
    return numpy_backend


def backend_name() -> str:
    return "cython" if _compiled is not None else "numpy"
