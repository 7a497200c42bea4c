"""Per-agent memory: an ordered trace of observations and plans.

Retrieval scores a record by recency and keyword match:

    score = w_r * decay^(now - tick) + w_m * matched_query_fraction

with defaults w_r = 1, w_m = 1, decay = 0.99. Ties go to the more recent
record, then to insertion order. Capacity-bounded stores evict the
lowest-scored records when full, so what remains is always the best of
what was seen.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ObservationRecord:
    tick: int
    agent: int
    text: str
    structured: tuple = ()   # the source percepts
    seq: int = 0

    kind = "observation"


@dataclass(frozen=True)
class PlanRecord:
    tick: int
    agent: int
    text: str
    goal: str = ""
    steps: tuple = ()
    seq: int = 0

    kind = "plan"


@dataclass(frozen=True)
class QuerySpec:
    keywords: tuple = ()
    w_recency: float = 1.0
    w_match: float = 1.0
    decay: float = 0.99


_WORDS = re.compile(r"[a-z0-9_]+")


def _tokens(text: str) -> set:
    return set(_WORDS.findall(text.lower()))


def score(record, query: QuerySpec, now: int) -> float:
    recency = query.decay ** (now - record.tick)
    if query.keywords:
        words = _tokens(record.text)
        match = sum(1 for k in query.keywords if k.lower() in words) / len(query.keywords)
    else:
        match = 0.0
    return query.w_recency * recency + query.w_match * match


class MemoryStore:
    """Insertion-ordered record list with optional capacity."""

    def __init__(self, capacity: int | None = None):
        self.capacity = capacity
        self.records: list = []
        self._seq = 0

    def __len__(self):
        return len(self.records)

    def append(self, record, now: int | None = None):
        record = replace(record, seq=self._seq)
        self._seq += 1
        self.records.append(record)
        if self.capacity is not None and len(self.records) > self.capacity:
            at = now if now is not None else record.tick
            keyed = sorted(self.records,
                           key=lambda r: (score(r, QuerySpec(), at), r.tick, r.seq))
            self.records.remove(keyed[0])
        return record


def memory_retrieve(store: MemoryStore, query: QuerySpec, k: int,
                    now: int) -> list:
    """Top-k records by score; never invents records, never reorders ties
    away from recency then insertion order."""
    if k < 0:
        raise ValueError("k must be non-negative")
    ranked = sorted(store.records,
                    key=lambda r: (-score(r, query, now), -r.tick, r.seq))
    return ranked[:k]
