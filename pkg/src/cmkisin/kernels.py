"""Backend selection for the prime-field hot loops.

The compiled extension is used when it imports; setting ``CMKISIN_PURE=1``
forces the pure-Python reference implementation.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CMKISIN_PURE") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined,no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

mul_trunc = _impl.mul_trunc
solve_scalar = _impl.solve_scalar

__all__ = ["BACKEND", "mul_trunc", "solve_scalar"]
