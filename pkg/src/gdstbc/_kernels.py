"""Backend selection for the hot decoder kernel.

The compiled extension is used when it imported cleanly; otherwise the
NumPy fallback takes over.  Set ``GDSTBC_PURE_PYTHON=1`` in the
environment to force the fallback (useful for benchmarking and testing).
"""

import os

from . import _kernels_py

if os.environ.get("GDSTBC_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

metric_scan = _impl.metric_scan


def compiled_available() -> bool:
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
