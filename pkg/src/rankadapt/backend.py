"""Kernel backend selection.

Set RANKADAPT_BACKEND=numpy to force the pure-numpy path, =numba to require
the JIT path (raises if numba is unavailable).  Default: numba when
importable, numpy otherwise.  The choice is made once at import.
"""

import os
import warnings

from . import kernels_numpy

_ENV_VAR = "RANKADAPT_BACKEND"


def _select():
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{_ENV_VAR} must be 'numba', 'numpy' or unset, got {choice!r}")
    if choice == "numpy":
        return kernels_numpy
    try:
        from . import kernels_numba
    except ImportError:
        if choice == "numba":
            raise
        warnings.warn("numba unavailable; falling back to numpy kernels")
        return kernels_numpy
    return kernels_numba


kernels = _select()


def backend_name():
    """Name of the active kernel set: 'numba' or 'numpy'."""
    return kernels.BACKEND_NAME
