from typing import Any, Callable, Dict, Optional, TypeVar
import functools
import hashlib
import json
import threading

from fermion_boson_sim.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")


class MemoryCache:
    """In-process memo store for expensive pure computations"""

    def __init__(self, prefix: str = "cache:", max_entries: int = 4096):
        """
        Initialize memory cache

        Args:
            prefix: Key prefix
            max_entries: Entry limit; the store is cleared when it is reached
        """
        self.prefix = prefix
        self.max_entries = max_entries
        self._store: Dict[str, Any] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: str) -> Optional[Any]:
        """
        Get value from cache

        Args:
            key: Cache key

        Returns:
            Cached value or None if not found
        """
        with self._lock:
            return self._store.get(f"{self.prefix}{key}")

    def set(self, key: str, value: Any) -> bool:
        """
        Set value in cache

        Args:
            key: Cache key
            value: Value to cache

        Returns:
            True if stored
        """
        with self._lock:
            if len(self._store) >= self.max_entries:
                logger.debug("Cache full, clearing", entries=len(self._store))
                self._store.clear()
            self._store[f"{self.prefix}{key}"] = value
        return True

    def delete(self, key: str) -> bool:
        """
        Delete value from cache

        Args:
            key: Cache key

        Returns:
            True if a value was removed
        """
        with self._lock:
            return self._store.pop(f"{self.prefix}{key}", None) is not None

    def clear(self) -> None:
        """Drop every cached entry"""
        with self._lock:
            self._store.clear()
            self.hits = 0
            self.misses = 0

    def cached(
        self,
        key_prefix: str,
        key_builder: Optional[Callable[..., str]] = None,
    ) -> Callable[[Callable[..., T]], Callable[..., T]]:
        """
        Decorator for caching function results

        Args:
            key_prefix: Prefix for cache key
            key_builder: Function to build cache key from arguments

        Returns:
            Decorated function
        """
        def decorator(func: Callable[..., T]) -> Callable[..., T]:
            @functools.wraps(func)
            def wrapper(*args: Any, **kwargs: Any) -> T:
                if key_builder:
                    cache_key = f"{key_prefix}:{key_builder(*args, **kwargs)}"
                else:
                    arg_str = json.dumps(
                        [repr(arg) for arg in args] +
                        [f"{k}:{v!r}" for k, v in sorted(kwargs.items())],
                        sort_keys=True,
                    )
                    cache_key = f"{key_prefix}:{hashlib.md5(arg_str.encode()).hexdigest()}"

                cached_value = self.get(cache_key)
                if cached_value is not None:
                    self.hits += 1
                    return cached_value

                self.misses += 1
                result = func(*args, **kwargs)
                self.set(cache_key, result)
                return result

            wrapper.cache = self  # type: ignore[attr-defined]
            return wrapper

        return decorator


# Shared cache instance
memory_cache = MemoryCache()
cached = memory_cache.cached
