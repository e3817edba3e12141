"""Kernel backend selection.

The histogram-accumulation and tree-routing inner loops exist twice: a
numba ``@njit`` implementation and a pure-numpy fallback that produces
bit-identical results.  Set ``TSGBM_DISABLE_NUMBA=1`` to force the numpy
path (or when numba is unavailable the fallback is used automatically).
"""

from __future__ import annotations

import os


def numba_disabled_by_env() -> bool:
    return os.environ.get("TSGBM_DISABLE_NUMBA", "").strip() in ("1", "true", "yes")


def _load():
    from .gbm import _kernels_numpy

    if numba_disabled_by_env():
        return _kernels_numpy, "numpy"
    try:
        from .gbm import _kernels_numba

        return _kernels_numba, "numba"
    except ImportError:
        return _kernels_numpy, "numpy"


_KERNELS, _BACKEND_NAME = None, None


def get_kernels():
    global _KERNELS, _BACKEND_NAME
    if _KERNELS is None:
        _KERNELS, _BACKEND_NAME = _load()
    return _KERNELS


def backend_name() -> str:
    get_kernels()
    return _BACKEND_NAME
