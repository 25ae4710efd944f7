"""Kernel backend selection.

The compiled extension ``_core`` is used when it imports; otherwise the
pure-Python ``_pycore`` takes over.  Setting ``CONTACTNET_PURE_PYTHON=1``
forces the fallback.
"""

from __future__ import annotations

import os

from . import _pycore

if os.environ.get("CONTACTNET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pycore
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _pycore

BACKEND = "python" if _impl is _pycore else "compiled"

bfs_histogram = _impl.bfs_histogram
swap_chain = _impl.swap_chain
merge_level = _impl.merge_level
refine = _impl.refine
layout_energy_grad = _impl.layout_energy_grad


def backends() -> dict:
    """Available backends by name."""
    out = {"python": _pycore}
    try:
        from . import _core
        out["compiled"] = _core
    except ImportError:
        pass
    return out
