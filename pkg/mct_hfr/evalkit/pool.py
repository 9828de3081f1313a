"""Definition of the `ShardPool`-class."""

from typing import Any, Callable, Optional, Sequence
import threading

from mct_hfr.logging import Logging


class ShardPool:
    """
    Definition of a thread-pool for independent evaluation shards.

    Every worker thread repeatedly claims the next unprocessed shard.
    Results are collected by shard index and returned in ascending
    index order, independent of scheduling.

    Keyword arguments:
    size -- pool size
            (default 1)
    """

    def __init__(self, size: int = 1) -> None:
        if size < 1:
            raise ValueError(
                f"ShardPool needs at least one worker (got {size})."
            )
        self._size = size
        self._pool_lock = threading.RLock()
        self._next = 0
        self._results: dict[int, Any] = {}
        self._errors: dict[int, BaseException] = {}
        self._running = False

    @property
    def size(self) -> int:
        """Returns pool size."""
        return self._size

    @property
    def running(self) -> bool:
        """Returns `True` while shards are processed."""
        return self._running

    def _claim(self, total: int) -> Optional[int]:
        with self._pool_lock:
            if self._next >= total:
                return None
            index = self._next
            self._next += 1
            return index

    def _work(self, fn: Callable[[Any], Any], shards: Sequence) -> None:
        while (index := self._claim(len(shards))) is not None:
            try:
                result = fn(shards[index])
            # pylint: disable=broad-exception-caught
            except Exception as exc_info:
                Logging.error(f"Shard {index} failed: {exc_info}")
                with self._pool_lock:
                    self._errors[index] = exc_info
                continue
            with self._pool_lock:
                self._results[index] = result

    def map(self, fn: Callable[[Any], Any], shards: Sequence) -> list:
        """
        Applies `fn` to every element of `shards` and returns the
        results in shard order. If shards fail, the error of the
        failed shard with the lowest index is re-raised after all
        workers have finished.
        """
        with self._pool_lock:
            if self._running:
                raise RuntimeError("ShardPool is already running.")
            self._running = True
            self._next = 0
            self._results = {}
            self._errors = {}

        try:
            threads = [
                threading.Thread(
                    target=self._work, args=(fn, shards), daemon=True
                )
                for _ in range(min(self._size, max(len(shards), 1)))
            ]
            for thread in threads:
                thread.start()
            for thread in threads:
                thread.join()
        finally:
            with self._pool_lock:
                self._running = False

        if self._errors:
            raise self._errors[min(self._errors)]
        return [self._results[index] for index in range(len(shards))]
