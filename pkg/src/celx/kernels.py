"""Kernel dispatch: the compiled extension when built, the pure-Python module otherwise."""

from __future__ import annotations

try:
    from . import _kernels as _impl

    COMPILED = True
except ImportError:  # extension not built; same API in pure Python
    from . import _kernels_py as _impl

    COMPILED = False

hilbert_basis = _impl.hilbert_basis
horn_search = _impl.horn_search

__all__ = ["COMPILED", "hilbert_basis", "horn_search"]
