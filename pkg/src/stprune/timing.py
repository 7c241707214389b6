"""Per-phase wall-time accounting for run reports and the bench harness."""

from __future__ import annotations

import time
from contextlib import contextmanager

PHASES = ("score", "seed", "expand", "assembly")


class PhaseTimer:
    """Accumulates monotonic nanoseconds per pipeline phase."""

    def __init__(self):
        self.ns: dict[str, int] = {name: 0 for name in PHASES}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter_ns()
        try:
            yield
        finally:
            self.ns[name] += time.perf_counter_ns() - start

    def as_us(self) -> dict[str, int]:
        return {f"{name}_us": self.ns[name] // 1000 for name in PHASES}


class _NullTimer(PhaseTimer):
    @contextmanager
    def phase(self, name: str):
        yield


NULL_TIMER = _NullTimer()
