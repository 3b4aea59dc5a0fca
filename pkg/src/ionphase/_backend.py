"""Pick the compiled kernels when available, else the numpy fallback.

Set ``IONPHASE_PURE_PYTHON=1`` to force the fallback.
"""
import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

BACKEND = "python"
kernels = _kernels_py

if os.environ.get("IONPHASE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using numpy fallback")
    else:
        kernels = _compiled
        BACKEND = "cython"


def get_kernels(backend=None):
    """Return the kernel module for ``backend`` ("cython", "python" or None for the default)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {backend!r}")
