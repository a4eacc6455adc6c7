"""Kernel backend selection.

The numba path is used when available. Set SUPERCHAT_NUMBA=0 (or
NUMBA_DISABLE_JIT=1) to force the pure NumPy fallback; both backends
produce bit-identical results. benchmarks/bench_kernels.py compares them.
"""

import logging
import os

log = logging.getLogger(__name__)


def _numba_enabled() -> bool:
    flag = os.environ.get("SUPERCHAT_NUMBA", "").strip().lower()
    if flag in ("0", "false", "no", "off"):
        return False
    if os.environ.get("NUMBA_DISABLE_JIT", "").strip() == "1":
        return False  # @njit would fall back to interpreted loops; use NumPy instead
    return True


BACKEND = "numpy"
if _numba_enabled():
    try:
        from .kernels_numba import (  # noqa: F401
            col2im3x3,
            im2col3x3,
            maxpool2_backward,
            maxpool2_forward,
        )

        BACKEND = "numba"
    except ImportError as exc:
        log.warning("numba unavailable (%s); using NumPy kernels", exc)

if BACKEND == "numpy":
    from .kernels_numpy import (  # noqa: F401
        col2im3x3,
        im2col3x3,
        maxpool2_backward,
        maxpool2_forward,
    )


def backend_name() -> str:
    return BACKEND
