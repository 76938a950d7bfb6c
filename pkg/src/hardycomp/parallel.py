"""Opt-in thread parallelism with order-preserving results."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "HARDYCOMP_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(ENV_THREADS, "1")))
    except ValueError:
        return 1


def pmap(fn, items, threads: int | None = None):
    """``list(map(fn, items))``, optionally on a thread pool.

    Results keep input order so any later reduction is deterministic.
    """
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
