"""Deterministic process-parallel map capped by ``PENCILLAB_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

__all__ = ["worker_count", "pmap"]


def worker_count(requested=None) -> int:
    """Number of worker processes to use.

    ``requested`` wins when given; otherwise ``PENCILLAB_THREADS`` if set,
    else the CPU count. The environment variable is also an upper bound.
    """
    cpus = os.cpu_count() or 1
    env = os.environ.get("PENCILLAB_THREADS")
    cap = cpus
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValueError(f"PENCILLAB_THREADS must be an integer, got {env!r}") from None
    n = cap if requested is None else min(int(requested), cap)
    return max(1, n)


def pmap(fn, items, workers=None, chunksize=1):
    """``[fn(x) for x in items]``, possibly in worker processes; order is preserved."""
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunksize))
