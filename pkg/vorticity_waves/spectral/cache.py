"""
Bounded cache for spectral multiplier tables

Entries are made read-only before they are stored, and the table itself is
guarded by a lock so transforms can run from worker threads.
"""
import hashlib
import json
import logging
import threading
from collections import OrderedDict
from typing import Any, Callable, Dict, Optional

import numpy as np

logger = logging.getLogger(__name__)


class MultiplierCache:
    """
    Caches multiplier vectors keyed by their kind and defining arguments
    """

    def __init__(self, max_size: int = 256):
        """
        Initialize cache

        Args:
            max_size: Maximum number of tables kept; the oldest is evicted first
        """
        self.max_size = max_size
        self.cache: "OrderedDict[str, np.ndarray]" = OrderedDict()
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def _generate_cache_key(self, kind: str, arguments: Dict[str, Any]) -> str:
        """Generate a cache key from the table kind and its arguments"""
        args_str = json.dumps(arguments, sort_keys=True, default=repr)
        combined = f"{kind}:{args_str}"
        return hashlib.sha256(combined.encode()).hexdigest()

    def get(self, kind: str, arguments: Dict[str, Any]) -> Optional[np.ndarray]:
        key = self._generate_cache_key(kind, arguments)
        with self._lock:
            table = self.cache.get(key)
            if table is None:
                self.misses += 1
            else:
                self.hits += 1
            return table

    def set(self, kind: str, arguments: Dict[str, Any], table: np.ndarray) -> np.ndarray:
        """
        Store a table

        Args:
            kind: Multiplier family name
            arguments: Values that define the table
            table: The multiplier vector

        Returns:
            The stored, read-only table
        """
        table = np.array(table, dtype=float)
        table.setflags(write=False)
        key = self._generate_cache_key(kind, arguments)
        with self._lock:
            # FIFO eviction
            while len(self.cache) >= self.max_size:
                self.cache.popitem(last=False)
            self.cache[key] = table
        return table

    def get_or_build(self, kind: str, arguments: Dict[str, Any], build: Callable[[], np.ndarray]) -> np.ndarray:
        table = self.get(kind, arguments)
        if table is None:
            table = self.set(kind, arguments, build())
        return table

    def clear(self):
        """Clear all cache entries"""
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def get_cache_stats(self) -> Dict[str, Any]:
        """Get cache statistics"""
        with self._lock:
            return {
                "size": len(self.cache),
                "max_size": self.max_size,
                "hits": self.hits,
                "misses": self.misses,
            }


multiplier_cache = MultiplierCache()
