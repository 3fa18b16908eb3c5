"""Kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-Python twin
when the extension was not built.  Set LDSIM_PURE_PYTHON=1 to force the
fallback (used by the backend benchmark and equivalence tests).
"""

import os

if os.environ.get("LDSIM_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND
greedy_parents = kernels.greedy_parents
drain_rounds = kernels.drain_rounds
