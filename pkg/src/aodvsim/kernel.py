"""Discrete-event scheduler with a virtual clock and a seeded random source.

Events are kept in a binary heap keyed on ``(fire_at, insertion_index)`` so
that events sharing a timestamp fire in the order they were scheduled.

Random draws come from numpy's PCG64 bit generator, whose output stream is
fixed for a given seed regardless of platform.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np


class EventKind(Enum):
    TIMER = "timer"
    DELIVERY = "packet-delivery"
    MOTION = "motion-update"
    TRAFFIC = "traffic-emit"
    SIM_END = "sim-end"


@dataclass(eq=False)
class Event:
    fire_at: float
    callback: Callable[..., Any]
    args: tuple = ()
    kind: EventKind = EventKind.TIMER
    target: int | None = None
    cancelled: bool = field(default=False, repr=False)
    fired: bool = field(default=False, repr=False)

    def cancel(self) -> None:
        # cancelling a fired or already-cancelled event does nothing
        if not self.fired:
            self.cancelled = True


class SimulationOver(RuntimeError):
    pass


class Kernel:
    def __init__(self, seed: int = 0):
        self.now = 0.0
        self.seed = seed
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._queue: list[tuple[float, int, Event]] = []
        self._counter = itertools.count()
        self.terminated = False
        self.processed = 0

    def schedule(self, delay: float, callback: Callable[..., Any], *args,
                 kind: EventKind = EventKind.TIMER, target: int | None = None) -> Event:
        """Queue ``callback(*args)`` to run ``delay`` seconds from now.

        The returned event can be cancelled before it fires.
        """
        if self.terminated:
            raise SimulationOver("simulation already terminated")
        if not delay >= 0.0:
            raise ValueError(f"negative or invalid delay: {delay!r}")
        ev = Event(self.now + delay, callback, args, kind, target)
        heapq.heappush(self._queue, (ev.fire_at, next(self._counter), ev))
        return ev

    def at(self, when: float, callback: Callable[..., Any], *args, **kw) -> Event:
        return self.schedule(when - self.now, callback, *args, **kw)

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def run_until(self, t_end: float) -> int:
        """Fire every event with ``fire_at <= t_end``; return how many fired."""
        if t_end < self.now:
            raise ValueError(f"t_end {t_end} is before current time {self.now}")
        count = 0
        q = self._queue
        while q and q[0][0] <= t_end:
            fire_at, _, ev = heapq.heappop(q)
            if ev.cancelled:
                continue
            self.now = fire_at
            ev.fired = True
            ev.callback(*ev.args)
            count += 1
        self.now = t_end
        self.processed += count
        return count

    def terminate(self) -> None:
        self.terminated = True
        self._queue.clear()

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        if lo == hi:
            return lo
        return lo + (hi - lo) * float(self._rng.random())
