"""Optional thread-pool mapping for embarrassingly parallel sweeps.

CONTRACTION_LAB_THREADS caps the worker count (default 1 = serial).
Results are always reduced in input order, so parallel and serial runs
produce identical output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_ENV_VAR = "CONTRACTION_LAB_THREADS"


def worker_count() -> int:
    raw = os.environ.get(_ENV_VAR, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, min(n, 64))


def ordered_map(fn, items):
    """Map ``fn`` over ``items`` preserving order, threading if configured."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
