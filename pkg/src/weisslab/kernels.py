"""Backend selection for the hot kernels.

The compiled extension is used when it imports cleanly; otherwise the numpy
fallback in :mod:`weisslab._kernels_py` is used. Setting the environment
variable ``WEISSLAB_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("WEISSLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

riesz_cell_matrix = _impl.riesz_cell_matrix
power_gram = _impl.power_gram
green_potential = _impl.green_potential
witness_sum = _impl.witness_sum

__all__ = [
    "BACKEND",
    "riesz_cell_matrix",
    "power_gram",
    "green_potential",
    "witness_sum",
]
