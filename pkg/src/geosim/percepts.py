"""Percept records passed from the environment into agents."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Percept:
    kind: str                 # 'entity' | 'param'
    key: str                  # entity type name, or parameter name
    value: object = None      # parameter value; entity id for sightings
    source: int | None = None  # entity id the percept came from
    distance: float | None = None
    location: tuple | None = None
