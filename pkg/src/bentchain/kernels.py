"""Kernel selection: compiled extension if available, numpy otherwise.

Set BENTCHAIN_PURE_PYTHON=1 to force the numpy fallback (used by the
benchmark and by tests that compare the two paths).
"""

from __future__ import annotations

import os

if os.environ.get("BENTCHAIN_PURE_PYTHON"):
    COMPILED = False
    from ._kernels_np import end_probability, end_probability_curve
else:
    try:
        from ._kernels import end_probability, end_probability_curve

        COMPILED = True
    except ImportError:
        COMPILED = False
        from ._kernels_np import end_probability, end_probability_curve

__all__ = ["COMPILED", "end_probability", "end_probability_curve"]
