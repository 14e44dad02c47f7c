import functools
from typing import Any, Callable, List, Optional, Sequence, Type, TypeVar

import numpy as np

from fermion_boson_sim.core.errors import NumericError
from fermion_boson_sim.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")


def sync_retry(
    variants: Sequence[dict],
    exceptions: Optional[List[Type[Exception]]] = None,
):
    """
    Retry decorator that re-invokes a function with alternative keyword sets

    Args:
        variants: Keyword overrides tried one after another
        exceptions: List of exceptions to catch (defaults to LinAlgError and ValueError)
    """
    if exceptions is None:
        exceptions = [np.linalg.LinAlgError, ValueError]

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            retry_count = 0
            last_error: Optional[Exception] = None

            for override in variants:
                try:
                    return func(*args, **{**kwargs, **override})
                except tuple(exceptions) as e:
                    retry_count += 1
                    last_error = e
                    logger.warning(
                        "Retrying function",
                        function=func.__name__,
                        error=str(e),
                        retry_count=retry_count,
                        variant=override,
                    )

            logger.error(
                "Max retries exceeded",
                function=func.__name__,
                error=str(last_error),
                retry_count=retry_count,
            )
            raise NumericError(f"{func.__name__} failed for every variant: {last_error}")

        return wrapper

    return decorator
