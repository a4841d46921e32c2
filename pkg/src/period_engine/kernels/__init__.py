"""Hot inner loops, compiled when available.

The Cython extension is imported when it has been built; otherwise the
pure-Python fallback is used.  Setting ``PERIOD_ENGINE_PURE=1`` forces the
fallback.  ``BACKEND`` names the active implementation.
"""

import os

from . import _fallback

if os.environ.get("PERIOD_ENGINE_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

mul_trunc = _impl.mul_trunc
taylor_step = _impl.taylor_step

__all__ = ["BACKEND", "mul_trunc", "taylor_step"]
