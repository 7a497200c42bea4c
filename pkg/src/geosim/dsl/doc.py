"""Parsed scenario documents.

Every node is a frozen dataclass with tuple-valued collections, so two
parses of equivalent text compare equal structurally; the formatter and
the round-trip tests rely on that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from geosim.errors import GeosimError
from geosim.gas.model import FieldDecl, GeoRefConvention, NeighborhoodSpec


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    token: str = ""


class ScenarioParseError(GeosimError):
    def __init__(self, errors):
        self.errors = list(errors)
        head = "; ".join(f"{e.line}:{e.column} {e.message}" for e in self.errors[:3])
        more = "" if len(self.errors) <= 3 else f" (+{len(self.errors) - 3} more)"
        super().__init__(f"{len(self.errors)} syntax error(s): {head}{more}")


@dataclass(frozen=True)
class EnvBlock:
    params: tuple = ()      # (name, value)
    functions: tuple = ()   # EnvFunction


@dataclass(frozen=True)
class LayerBlock:
    name: str
    params: tuple = ()
    functions: tuple = ()


@dataclass(frozen=True)
class AutomatonBlock:
    name: str
    fields: tuple = ()              # FieldDecl
    spec: NeighborhoodSpec = field(default_factory=NeighborhoodSpec)
    transition: str | None = None   # rule names
    movement: str | None = None
    adjacency: str | None = None


@dataclass(frozen=True)
class ObjectBlock:
    name: str
    fields: tuple = ()


@dataclass(frozen=True)
class MindDecl:
    kind: str                   # rule_based | scripted | external
    transport: str | None = None  # pipe | http (external only)
    target: str | None = None     # transcript path or command/url


@dataclass(frozen=True)
class GoalDecl:
    name: str
    kind: str                   # maintenance | achievement
    condition: object = None


@dataclass(frozen=True)
class RoleDecl:
    name: str
    goals: tuple = ()
    description: str = ""


@dataclass(frozen=True)
class PossDecl:
    worlds: tuple = ()
    pi: tuple = ()              # (world, value)
    desires: tuple = ()         # (goal, guard expr, worlds tuple)


@dataclass(frozen=True)
class AgentBlock:
    name: str
    fields: tuple = ()
    shapes: tuple = (("point",),)
    actions: tuple = ()         # ActionSpec
    perceive: tuple = ()        # perception rule names, ordered
    decide: tuple = ()
    agree: tuple = ()
    goals: tuple = ()           # GoalDecl
    prefers: tuple = ()         # (goal, utility)
    intentions: int | None = None
    plans: tuple = ()           # (goal, step names)
    mind: MindDecl | None = None
    roles: tuple = ()           # RoleDecl
    use_cases: tuple = ()
    possibilistic: PossDecl | None = None


@dataclass(frozen=True)
class PlaceStmt:
    type_name: str
    count: int | None = None
    at: tuple | None = None
    layer: str | None = None
    assigns: tuple = ()


@dataclass(frozen=True)
class RunBlock:
    seed: int = 0
    ticks: int = 10
    stride: int = 1
    output: str = "records"
    dump_agents: bool = False


@dataclass(frozen=True)
class ScenarioDoc:
    env: EnvBlock = field(default_factory=EnvBlock)
    georef: GeoRefConvention | None = None
    layers: tuple = ()
    rules: tuple = ()           # rule nodes from geosim.rules.ast
    automata: tuple = ()
    objects: tuple = ()
    agents: tuple = ()
    places: tuple = ()
    run: RunBlock = field(default_factory=RunBlock)
