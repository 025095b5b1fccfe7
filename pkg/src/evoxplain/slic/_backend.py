"""Kernel backend selection: compiled extension if built, numpy otherwise.

Set EVOXPLAIN_PURE_PYTHON=1 to force the numpy fallback (used by the
kernel benchmark to compare both paths in one process).
"""

from __future__ import annotations

import os

from . import _numpy_kernel

if os.environ.get("EVOXPLAIN_PURE_PYTHON"):
    _impl = _numpy_kernel
else:
    try:
        from . import _assign as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _numpy_kernel

BACKEND: str = _impl.BACKEND
assign_step = _impl.assign_step


def get_kernels():
    """Both kernels when the extension is available, else just the fallback."""
    kernels = {"numpy": _numpy_kernel.assign_step}
    try:
        from . import _assign
        kernels["cython"] = _assign.assign_step
    except ImportError:
        pass
    return kernels
