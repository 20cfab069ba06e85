"""Kernel selection: the compiled core when importable, numpy otherwise.

Set ``SEMIOBL_PURE=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("SEMIOBL_PURE", "") not in ("", "0"):
        raise ImportError("pure fallback requested")
    from . import _kernels as _impl
except ImportError:
    _impl = _pykernels

IMPLEMENTATION: str = _impl.IMPLEMENTATION

block_min = _impl.block_min
eg_step = _impl.eg_step
path_loads = _impl.path_loads
greedy_cut = _impl.greedy_cut
loop_erased_walk = _impl.loop_erased_walk
valiant_trial_loads = _impl.valiant_trial_loads


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def implementations() -> dict:
    """Every importable kernel module by name (used by tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
