"""Process-wide runtime knobs."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SQUEEZE_THREADS"


def thread_count() -> int:
    """Worker cap from SQUEEZE_THREADS; defaults to serial execution."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Order-preserving map, threaded when SQUEEZE_THREADS allows.

    Results are collected by index, so output order (and therefore any
    serialized report built from it) does not depend on the worker
    count.
    """
    workers = min(thread_count(), len(items)) or 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
