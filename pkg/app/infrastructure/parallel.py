"""
Process-pool helpers for sweeps.

Results always come back in input order, and reductions use a fixed
pairwise tree so that totals do not depend on the worker count.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from app.core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    fn over items, results in input order.

    Args:
        fn: Picklable top-level callable
        items: Inputs
        threads: Worker processes; 1 runs serially in this process

    Returns:
        List of results aligned with items
    """
    items = list(items)
    threads = threads or settings.THREADS
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(threads, len(items))
    logger.info(f"Dispatching {len(items)} tasks to {workers} worker processes")
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def pairwise_sum(values: Sequence):
    """
    Sum by a balanced binary tree over the input order.

    The tree shape depends only on len(values).
    """
    values = list(values)
    if not values:
        return 0.0
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]
