"""Kernel backend selection.

The compiled extension (`treemi._speedups`) is preferred when it built;
otherwise the pure-Python twin (`treemi._native`) is used.  Set
TREEMI_PURE_PYTHON=1 to force the fallback, e.g. for benchmarking.
"""

from __future__ import annotations

import os

if os.environ.get("TREEMI_PURE_PYTHON", "") not in ("", "0"):
    from treemi import _native as _impl
else:
    try:
        from treemi import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        from treemi import _native as _impl  # type: ignore[no-redef]

BACKEND = _impl.BACKEND

poly_eval = _impl.poly_eval
poly_add = _impl.poly_add
poly_mul = _impl.poly_mul
poly_scale = _impl.poly_scale
poly_antideriv = _impl.poly_antideriv
poly_integrate = _impl.poly_integrate
interpolate_coeffs = _impl.interpolate_coeffs
normalize_union = _impl.normalize_union
intersect_unions = _impl.intersect_unions
