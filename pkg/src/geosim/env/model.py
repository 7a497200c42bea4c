"""The layered environment: parameters, functions, and embodied entities.

An environment is (global parameters, global functions, layers); each
layer is (local parameters, local functions, entities); each agent type
is a 6-tuple of state space, admissible shapes, actions, perception,
decision, and agreement functions. Entities are objects or agents with a
body: a shape and a location under the shared georeference.

Environments are value-semantic: operations return new ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from geosim.errors import GeosimError
from geosim.gas.model import FieldDecl, GeoRefConvention

POINT = ("point",)


def disc(radius: float) -> tuple:
    return ("disc", float(radius))


def box(w: float, h: float) -> tuple:
    return ("box", float(w), float(h))


@dataclass(frozen=True)
class EnvFunction:
    """A named parameter-update block, applied in declaration order."""

    name: str
    assigns: tuple = ()  # ((param name, expr), ...)


@dataclass(frozen=True)
class ObjectType:
    name: str
    state_schema: tuple = ()  # FieldDecl


@dataclass(frozen=True)
class AgentConfig:
    """Scenario-declared internal-state seed for agents of a type."""

    goals: tuple = ()            # Goal
    preferences: dict = field(default_factory=dict)
    plans: tuple = ()            # (goal id, steps tuple)
    max_intentions: int = 1
    mind: object = None          # mind backend declaration from the scenario
    roles: tuple = ()            # RoleSpec
    use_cases: tuple = ()
    possibilistic: object = None  # PossibilisticState seed


@dataclass(frozen=True)
class AgentTypeTau:
    """The embodied agent type: its six defining components plus the
    scenario's internal-state seed."""

    name: str
    state_schema: tuple = ()     # FieldDecl
    shapes: tuple = (POINT,)
    actions: tuple = ()          # ActionSpec
    perception_fns: tuple = ()   # PerceptionRule
    decision_fns: tuple = ()     # DecisionRule
    agreement_fns: tuple = ()    # AgreementRule
    config: AgentConfig = field(default_factory=AgentConfig)

    def action(self, name: str):
        for a in self.actions:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Entity:
    id: int
    kind: str                    # 'object' | 'agent'
    type_name: str
    state: dict = field(default_factory=dict)
    location: tuple = (0, 0)
    shape: tuple = POINT
    observed: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("object", "agent"):
            raise GeosimError(f"entity {self.id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class EntitySpec:
    kind: str
    type_name: str
    state: dict = field(default_factory=dict)
    location: tuple | None = None   # None: uniform random placement
    shape: tuple = POINT


@dataclass(frozen=True)
class Layer:
    name: str
    params: dict = field(default_factory=dict)
    functions: tuple = ()        # EnvFunction
    entities: dict = field(default_factory=dict)  # id -> Entity


@dataclass(frozen=True)
class Environment:
    georef: GeoRefConvention = field(default_factory=GeoRefConvention)
    params: dict = field(default_factory=dict)
    functions: tuple = ()        # EnvFunction, global
    layers: tuple = ()           # Layer, ordered
    agent_types: dict = field(default_factory=dict)   # name -> AgentTypeTau
    object_types: dict = field(default_factory=dict)  # name -> ObjectType
    next_id: int = 0

    def __post_init__(self):
        names = [l.name for l in self.layers]
        if len(names) != len(set(names)):
            raise GeosimError("layer names must be unique")
        seen = set()
        for layer in self.layers:
            for eid in layer.entities:
                if eid in seen:
                    raise GeosimError(f"entity id {eid} appears in two layers")
                seen.add(eid)

    def layer(self, name: str) -> Layer:
        for l in self.layers:
            if l.name == name:
                return l
        raise GeosimError(f"unknown layer {name!r}")

    def has_layer(self, name: str) -> bool:
        return any(l.name == name for l in self.layers)

    def find(self, eid: int):
        """(layer, entity) for a live id, or (None, None)."""
        for layer in self.layers:
            ent = layer.entities.get(eid)
            if ent is not None:
                return layer, ent
        return None, None

    def entities(self):
        for layer in self.layers:
            for eid in sorted(layer.entities):
                yield layer, layer.entities[eid]

    def merged_params(self, layer: Layer | None = None) -> dict:
        merged = dict(self.params)
        if layer is not None:
            merged.update(layer.params)
        return merged

    def with_layer(self, new_layer: Layer) -> "Environment":
        layers = tuple(new_layer if l.name == new_layer.name else l
                       for l in self.layers)
        return replace(self, layers=layers)

    def type_of(self, ent: Entity):
        if ent.kind == "agent":
            return self.agent_types.get(ent.type_name)
        return self.object_types.get(ent.type_name)

    def schema_of(self, ent: Entity) -> tuple:
        t = self.type_of(ent)
        return t.state_schema if t is not None else ()
