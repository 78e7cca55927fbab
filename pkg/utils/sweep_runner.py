import os
import logging
logger = logging.getLogger(__name__)
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

WORKERS = int(os.environ.get("DYNB_WORKERS", str(min(8, os.cpu_count() or 1))))


class SweepPointError(Exception):
    """A sweep point failed; wraps the original error and remembers the input."""

    def __init__(self, index: int, value, cause: BaseException):
        self.index = index
        self.value = value
        self.cause = cause
        super().__init__(f"sweep point {index} ({value!r}) failed: {cause}")


def execute_sweep(func: Callable[[T], R], values: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Evaluate func on every value, concurrently when workers > 1. Results come
    back in input order whatever the completion order; the first failing
    point (in input order) raises SweepPointError.
    """
    items = list(values)
    workers = WORKERS if workers is None else workers
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    def _call(indexed):
        index, value = indexed
        try:
            return func(value)
        except Exception as e:
            logger.error(f"Sweep point {index} ({value!r}) failed: {e}")
            raise SweepPointError(index, value, e) from e

    if workers == 1 or len(items) <= 1:
        return [_call(pair) for pair in enumerate(items)]

    logger.info(f"Evaluating {len(items)} sweep points on {min(workers, len(items))} threads")
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(_call, enumerate(items)))
