"""
Bounded, order-preserving fan-out of pure functions over worker threads.

Results come back in input order whatever the completion order, so merges
done by the caller are identical for any `jobs` value.

Workers are threads, so pure-Python work (matching, segment tagging) is
serialized by the GIL and `jobs` mostly overlaps crop rendering and PNG
I/O, where numpy and Pillow release it. Callers pass closures, which a
process pool could not pickle.
"""

import asyncio
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


async def _gather_bounded(fn: Callable[[T], R], items: list[T], jobs: int) -> list[R]:
    semaphore = asyncio.Semaphore(jobs)

    async def run(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(fn, item)

    return await asyncio.gather(*(run(item) for item in items))


def map_ordered(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Apply fn to every item with at most `jobs` concurrent workers."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    return asyncio.run(_gather_bounded(fn, items, jobs))
