"""Order-preserving thread fan-out.

Work is always cut into the same pieces whatever the worker count, and results
come back in submission order, so a run with four threads produces exactly the
bytes of a run with one.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

_T = TypeVar("_T")
_R = TypeVar("_R")

DEFAULT_CHUNK_SIZE = 512


def chunk_slices(total: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[slice]:
    """Split ``range(total)`` into consecutive slices of at most ``chunk_size`` items."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    return [slice(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def thread_map(func: Callable[[_T], _R], items: Iterable[_T], threads: int = 1) -> List[_R]:
    """Apply ``func`` to every item, in order, on at most ``threads`` workers.

    The first exception raised (in item order) propagates to the caller.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))
