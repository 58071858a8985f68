"""Kernel backend selection.

Hot inner loops (colouring enumeration, Jacobi sweeps, pairwise TV scans,
chain simulation) are compiled with numba when available.  Setting the
environment variable ``SPECMIX_BACKEND=numpy`` before import forces the
pure-Python/numpy fallback; ``SPECMIX_BACKEND=numba`` insists on numba and
fails loudly if it cannot be imported.  Both paths execute the same source
functions, so results are bit-identical.
"""

import os

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False

_choice = os.environ.get("SPECMIX_BACKEND", "").strip().lower()
if _choice == "":
    _choice = "numba" if HAVE_NUMBA else "numpy"
if _choice not in ("numba", "numpy"):
    raise RuntimeError(f"SPECMIX_BACKEND must be 'numba' or 'numpy', got {_choice!r}")
if _choice == "numba" and not HAVE_NUMBA:
    raise RuntimeError("SPECMIX_BACKEND=numba but numba is not importable")

USING_NUMBA = _choice == "numba"
BACKEND = _choice


def compiled(fn):
    """JIT-compile ``fn`` under the numba backend, return it unchanged otherwise."""
    if USING_NUMBA:
        return _njit(cache=True)(fn)
    return fn


def jit_always(fn):
    """JIT-compile ``fn`` whenever numba is importable, regardless of backend."""
    if HAVE_NUMBA:
        return _njit(cache=True)(fn)
    return fn
