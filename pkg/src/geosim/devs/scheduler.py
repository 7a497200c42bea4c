"""Discrete-event time management.

Events carry a real-valued time, an integer priority (lower runs first)
and an insertion sequence number; (time, priority, seq) is a strict total
order, so processing is fully deterministic. Handlers run one at a time on
the caller's thread and may schedule further events at or after the
current time.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from geosim.errors import PastTimeError, SchedulerAborted

GLOBAL = "global"


@dataclass(frozen=True, order=True)
class Event:
    time: float
    priority: int = 0
    seq: int = field(default=0, compare=True)
    target: object = field(default=GLOBAL, compare=False)
    payload: object = field(default=None, compare=False)


class Clock:
    def __init__(self, now: float = 0.0, horizon: float = float("inf")):
        if now < 0.0:
            raise PastTimeError("clock cannot start below zero")
        self.now = now
        self.horizon = horizon

    def advance(self, t: float) -> None:
        if t < self.now:
            raise PastTimeError(f"clock moving backwards: {t} < {self.now}")
        self.now = t


class EventQueue:
    """Priority queue over (time, priority, seq); seq is assigned here."""

    def __init__(self):
        self._heap: list[Event] = []
        self._seq = 0

    def __len__(self):
        return len(self._heap)

    def peek(self) -> Event:
        return self._heap[0]

    def push(self, time: float, priority: int = 0, target=GLOBAL,
             payload=None) -> Event:
        ev = Event(time, priority, self._seq, target, payload)
        self._seq += 1
        heapq.heappush(self._heap, ev)
        return ev

    def pop(self) -> Event:
        return heapq.heappop(self._heap)

    def snapshot(self) -> list[Event]:
        return sorted(self._heap)


def schedule(queue: EventQueue, clock: Clock, time: float, priority: int = 0,
             target=GLOBAL, payload=None) -> Event:
    """Insert an event; scheduling before the clock is an error."""
    if time < clock.now:
        raise PastTimeError(
            f"cannot schedule at {time}: clock is already at {clock.now}")
    return queue.push(time, priority, target, payload)


def run_until(queue: EventQueue, clock: Clock, horizon: float,
              handler) -> list[Event]:
    """Process events in total order until none remain at or before the
    horizon.

    Returns the trace of processed events. The clock ends at the horizon
    when the queue drained, otherwise at the last processed time. A
    handler exception aborts the run and carries the partial trace.
    """
    if horizon < clock.now:
        raise PastTimeError(f"horizon {horizon} is before the clock {clock.now}")
    trace: list[Event] = []
    while len(queue) and queue.peek().time <= horizon:
        ev = queue.pop()
        clock.advance(ev.time)
        trace.append(ev)
        try:
            handler(ev, queue, clock)
        except Exception as exc:
            raise SchedulerAborted(exc, trace) from exc
    if len(queue) == 0:
        clock.advance(horizon)
    return trace
