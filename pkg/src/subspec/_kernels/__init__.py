"""Kernel backend selection.

The compiled Cython kernel is preferred when available; a pure-numpy
implementation with identical semantics is the fallback.  Set
SUBSPEC_KERNEL=numpy or SUBSPEC_KERNEL=cython to force a backend.
"""

import os

from . import _cocycle_np

_forced = os.environ.get("SUBSPEC_KERNEL", "").strip().lower()

backend_name = "numpy"
_impl = _cocycle_np

if _forced != "numpy":
    try:
        from . import _cocycle_cy as _cy

        _impl = _cy
        backend_name = "cython"
    except ImportError:
        if _forced == "cython":
            raise

cocycle_matrices = _impl.cocycle_matrices
cocycle_products = _impl.cocycle_products
