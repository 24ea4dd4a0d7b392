"""
Order-preserving map over a process pool for the bounded checks
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)

# Batches smaller than this run in-process.
MIN_PARALLEL_ITEMS = 64


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply fn to every item, keeping input order in the result.

    Args:
        fn: Picklable callable (module-level function or functools.partial)
        items: Inputs, consumed once
        workers: Number of worker processes; 1 or less runs sequentially

    Returns:
        Results in the order of items
    """
    batch = list(items)
    if workers <= 1 or len(batch) < MIN_PARALLEL_ITEMS:
        return [fn(item) for item in batch]
    logger.debug("mapping %d items over %d worker processes", len(batch), workers)
    chunk = max(1, len(batch) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, batch, chunksize=chunk))
