"""Pivot-kernel selection: compiled extension when available, numpy otherwise.

Set ``GPTLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and by tests that compare the two kernels).
"""

from __future__ import annotations

import os

from gptlab.lp import _pivot_py

OPTIMAL = _pivot_py.OPTIMAL
UNBOUNDED = _pivot_py.UNBOUNDED
MAXITER = _pivot_py.MAXITER

if os.environ.get("GPTLAB_PURE_PYTHON"):
    _impl = _pivot_py
    HAVE_COMPILED = False
else:
    try:
        from gptlab.lp import _pivot_cy as _impl  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        _impl = _pivot_py
        HAVE_COMPILED = False

run_pivots = _impl.run_pivots
KERNEL_NAME = _impl.KERNEL_NAME
