import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from .settings import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply ``fn`` to every item, preserving input order.

    Runs in a thread pool when more than one worker is configured
    (``Settings.runtime.workers`` unless ``workers`` is given). Callers reduce
    the returned list in order, so results do not depend on the worker count.
    """
    items = list(items)
    workers = get_settings().runtime.workers if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    logger.debug(f"Mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
