"""Kernel backend selection.

The compiled extension is preferred; set ``HYDFIT_PURE_PYTHON=1`` to force
the pure-Python implementation.
"""
import os

from . import _kernels_py

if os.environ.get("HYDFIT_PURE_PYTHON", "") == "1":
    backend = _kernels_py
else:
    try:
        from . import _kernels as backend
    except ImportError:
        backend = _kernels_py

BACKEND = backend.NAME
step = backend.step
run_to_exhaustion = backend.run_to_exhaustion
hold = backend.hold
trace = backend.trace

__all__ = ["BACKEND", "step", "run_to_exhaustion", "hold", "trace"]
