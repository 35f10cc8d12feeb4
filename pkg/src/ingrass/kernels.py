"""Kernel selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` twin.  Setting ``INGRASS_PURE_PYTHON=1`` forces the
fallback.  ``BACKEND`` names the active one.
"""

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("INGRASS_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure python requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def _prep(eu, ev):
    return (np.ascontiguousarray(eu, dtype=np.int64),
            np.ascontiguousarray(ev, dtype=np.int64))


def lrd_contract(n, eu, ev, score, thresholds, backend=None):
    """Run the multilevel contraction; see ``_pykernels.lrd_contract``."""
    impl = _pick(backend)
    eu, ev = _prep(eu, ev)
    return impl.lrd_contract(
        int(n), eu, ev,
        np.ascontiguousarray(score, dtype=np.float64),
        np.ascontiguousarray(thresholds, dtype=np.float64),
    )


def kruskal(n, eu, ev, backend=None):
    """Greedy spanning forest over edges in the given order (mask of kept edges)."""
    impl = _pick(backend)
    eu, ev = _prep(eu, ev)
    return impl.kruskal(int(n), eu, ev)


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _pykernels
    if backend == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {backend!r}")
