from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    label: str = "batch",
) -> List[R]:
    """
    Apply a function over items, possibly in parallel, keeping input order

    Args:
        func: Pure function of one item
        items: Work items
        workers: Thread count (defaults to settings.NUM_THREADS)
        label: Name used in log records

    Returns:
        Results in the order of items
    """
    work = list(items)
    width = max(1, workers if workers is not None else settings.NUM_THREADS)
    logger.info("Dispatching work", label=label, items=len(work), workers=width)

    if width == 1 or len(work) <= 1:
        return [func(item) for item in work]

    try:
        with ThreadPoolExecutor(max_workers=width) as executor:
            return list(executor.map(func, work))
    except Exception as e:
        logger.error("Worker batch failed", label=label, error=str(e))
        raise
