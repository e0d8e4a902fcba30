"""
Thread fan-out for independent evaluations.
Results always come back in submission order.
"""

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

from config.config import get_settings

T = TypeVar("T")
R = TypeVar("R")

_local = threading.local()


def _in_worker() -> bool:
    return getattr(_local, "in_worker", False)


def _as_worker(fn: Callable[[T], R]) -> Callable[[T], R]:
    def run(item: T) -> R:
        _local.in_worker = True
        try:
            return fn(item)
        finally:
            _local.in_worker = False
    return run


def map_ordered(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply fn to every item, in parallel threads when more than one worker is available.

    Calls made from inside a worker run serially, so nested fan-outs share
    the outer pool's threads instead of opening pools of their own.

    Args:
        fn: Pure function of one item
        items: Work items
        workers: Thread count (defaults to the configured worker count)

    Returns:
        list: fn(item) for each item, in input order
    """
    items = list(items)
    count = workers if workers is not None else get_settings().worker_count()
    if count <= 1 or len(items) <= 1 or _in_worker():
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(count, len(items))) as executor:
        return list(executor.map(_as_worker(fn), items))


def map_settled(fn: Callable[[T], R], items: Iterable[T], catch: Tuple[type, ...] = (Exception,),
                workers: Optional[int] = None) -> Tuple[List[Optional[R]], Optional[BaseException]]:
    """
    Like map_ordered, but an item raising one of catch yields None.

    Returns:
        tuple: (results with None for failed items, first failure in input order or None)
    """
    def attempt(item: T):
        try:
            return fn(item), None
        except catch as exc:
            return None, exc

    outcomes = map_ordered(attempt, items, workers)
    failure = next((exc for _, exc in outcomes if exc is not None), None)
    return [value for value, _ in outcomes], failure
