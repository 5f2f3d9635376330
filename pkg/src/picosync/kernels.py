"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the NumPy
fallback is loaded. Set ``PICOSYNC_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("PICOSYNC_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl
        BACKEND = "python"

xcorr_mag = _impl.xcorr_mag
argmax_range = _impl.argmax_range
qls_offset = _impl.qls_offset

__all__ = ["BACKEND", "xcorr_mag", "argmax_range", "qls_offset"]
