"""Kernel dispatch: compiled extension if present, NumPy fallback otherwise."""

from __future__ import annotations

try:
    from . import _assembly_cy as _impl

    KERNEL_BACKEND = "cython"
except ImportError:  # extension not built
    from . import _assembly_py as _impl

    KERNEL_BACKEND = "numpy"

from . import _assembly_py as python_kernels

mean_column = _impl.mean_column
pair_column = _impl.pair_column
