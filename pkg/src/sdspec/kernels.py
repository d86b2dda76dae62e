"""Kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``SDSPEC_PURE_PYTHON=1`` to force the fallback (used by the test-suite to
exercise both paths and by the benchmark).
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SDSPEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py

poly_shift = _impl.poly_shift
series_coefficients = _impl.series_coefficients
series_eval = _impl.series_eval
bessel01 = _impl.bessel01
bessel01_array = _impl.bessel01_array

__all__ = [
    "BACKEND",
    "poly_shift",
    "series_coefficients",
    "series_eval",
    "bessel01",
    "bessel01_array",
]
