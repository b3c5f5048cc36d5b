"""Chunked map with a thread cap taken from ``SYMRAD_THREADS``.

Chunk boundaries never depend on the thread count, and every chunk is
computed by the same sequence of operations, so results are bitwise
independent of the degree of concurrency.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

T = TypeVar("T")


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SYMRAD_THREADS", "1")))
    except ValueError:
        return 1


def chunk_bounds(total: int, chunk: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def map_chunks(fn: Callable[[int, int], T], total: int, chunk: int) -> list[T]:
    bounds = chunk_bounds(total, max(1, chunk))
    workers = min(thread_count(), len(bounds))
    if workers <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))
