"""
Utility functions for timestamps and elapsed wall-clock time.
Timestamps are Unix milliseconds; durations are seconds.
"""
import time
from datetime import datetime


def current_timestamp_millis() -> int:
    """
    Returns:
        current unix timestamp in milliseconds
    """
    return int(datetime.now().timestamp() * 1000)


class Stopwatch:
    """
    Measures elapsed seconds with a monotonic clock.

    Usable as a context manager; `elapsed` keeps growing until `stop()`
    (or the end of the `with` block) freezes it.
    """

    def __init__(self):
        self._start = time.perf_counter()
        self._stop = None

    def stop(self) -> float:
        if self._stop is None:
            self._stop = time.perf_counter()
        return self.elapsed

    @property
    def elapsed(self) -> float:
        end = self._stop if self._stop is not None else time.perf_counter()
        return end - self._start

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
