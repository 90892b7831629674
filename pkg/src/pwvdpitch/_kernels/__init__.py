"""Hot-loop kernels: compiled Cython core when built, numpy fallback otherwise.

Set ``PWVDPITCH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python_backend

try:
    if os.environ.get("PWVDPITCH_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernels disabled by PWVDPITCH_PURE_PYTHON")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND_NAME = "cython" if compiled_backend is not None else "python"

lag_products = backend.lag_products
first_prominent_peaks = backend.first_prominent_peaks

__all__ = ["lag_products", "first_prominent_peaks", "BACKEND_NAME",
           "python_backend", "compiled_backend"]
