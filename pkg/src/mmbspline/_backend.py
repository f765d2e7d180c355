"""Kernel backend selection.

The compiled extension is used when importable. Setting the environment
variable ``MMBSPLINE_BACKEND=python`` forces the pure-Python kernels.
"""
import os

from . import _pykernels

python_kernels = _pykernels

try:
    from . import _ckernels as compiled_kernels
except ImportError:
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("MMBSPLINE_BACKEND", "").lower() != "python":
    kernels = compiled_kernels
    BACKEND = "compiled"
else:
    kernels = _pykernels
    BACKEND = "python"

__all__ = ["BACKEND", "compiled_kernels", "kernels", "python_kernels"]
