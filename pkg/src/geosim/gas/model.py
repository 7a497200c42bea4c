"""The geographic automata model and its snapshots.

A model couples a set of automaton types with three total rule maps: a
state transition map, a movement map, and a neighborhood (adjacency) map,
all reading the pre-step world. Locations are governed by a georeferencing
convention, either an integer lattice or a continuous bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from geosim.errors import GeosimError, OutOfBoundsError
from geosim.gas import geometry
from geosim.rules import ast as R
from geosim.rules.program import CompiledRule, RuleContext, compile_rule


@dataclass(frozen=True)
class GeoRefConvention:
    kind: str = "lattice"             # 'lattice' | 'continuous'
    width: int = 1
    height: int = 1
    boundary: str = "clamp"           # 'clamp' | 'torus'
    box: tuple = (0.0, 0.0, 1.0, 1.0)  # continuous bounding box

    def __post_init__(self):
        if self.kind == "lattice":
            if self.width <= 0 or self.height <= 0:
                raise GeosimError("lattice dimensions must be positive")
        else:
            x0, y0, x1, y1 = self.box
            if not (x1 > x0 and y1 > y0):
                raise GeosimError("bounding box is degenerate")
        if self.boundary not in ("clamp", "torus"):
            raise GeosimError(f"unknown boundary mode {self.boundary!r}")

    @property
    def torus(self) -> bool:
        return self.boundary == "torus"

    def contains(self, location) -> bool:
        x, y = location
        if self.kind == "lattice":
            return 0 <= x < self.width and 0 <= y < self.height
        x0, y0, x1, y1 = self.box
        return x0 <= x <= x1 and y0 <= y <= y1


@dataclass(frozen=True)
class NeighborhoodSpec:
    metric: str = "moore"   # 'moore' | 'vonneumann' | 'euclidean'
    radius: float = 1.0

    @property
    def metric_code(self) -> int:
        return geometry.METRIC_NAMES[self.metric]


@dataclass(frozen=True)
class FieldDecl:
    name: str
    type: str            # 'number' | 'bool' | 'symbol'
    default: object = 0.0


@dataclass(frozen=True)
class AutomatonRecord:
    """One automaton at one tick: state, location, stored neighbor ids."""

    id: int
    type: str
    state: dict
    location: tuple
    neighborhood: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "neighborhood",
                           tuple(sorted(self.neighborhood)))
        if self.id in self.neighborhood:
            raise GeosimError(f"automaton {self.id} lists itself as a neighbor")


@dataclass(frozen=True)
class GasSnapshot:
    tick: int
    automata: dict = field(default_factory=dict)  # id -> AutomatonRecord

    def __post_init__(self):
        for aid, rec in self.automata.items():
            if aid != rec.id:
                raise GeosimError(f"snapshot key {aid} does not match record id {rec.id}")

    def ordered(self) -> list[AutomatonRecord]:
        return [self.automata[aid] for aid in sorted(self.automata)]


class GasModel:
    """The seven-part automata model; rule maps are total over the types.

    Missing movement or adjacency rules default to identity; a missing
    transition rule defaults to identity as well when constructed directly
    (the scenario validator is stricter and requires one).
    """

    def __init__(self, types, state_schema, georef, *, transition=None,
                 movement=None, adjacency=None, neighborhood_spec=None,
                 params=None):
        self.types = tuple(types)
        self.state_schema = {t: tuple(state_schema.get(t, ())) for t in self.types}
        self.georef = georef
        self.neighborhood_spec = {t: (neighborhood_spec or {}).get(t, NeighborhoodSpec())
                                  for t in self.types}
        self.params = dict(params or {})

        for mapping, label in ((transition, "transition"), (movement, "movement"),
                               (adjacency, "adjacency")):
            for t in (mapping or {}):
                if t not in self.types:
                    raise GeosimError(f"{label} rule map names unknown type {t!r}")

        # interning context shared by every rule of this model
        fields: dict[str, int] = {}
        for t in self.types:
            for fd in self.state_schema[t]:
                if fd.name in ("x", "y"):
                    raise GeosimError("state fields may not be named 'x' or 'y'")
                fields.setdefault(fd.name, len(fields))
        self.param_order = tuple(sorted(self.params))
        param_slots = {name: i for i, name in enumerate(self.param_order)}
        self.ctx = RuleContext(fields, param_slots, {})

        self.transition = self._total_map(transition, R.IDENTITY_TRANSITION)
        self.movement = self._total_map(movement, R.IDENTITY_MOVEMENT)
        self.adjacency = self._total_map(adjacency, R.IDENTITY_ADJACENCY)

        # symbol codes for every schema default come first, so hand-built
        # and compiled models intern in a stable order
        for t in self.types:
            for fd in self.state_schema[t]:
                if fd.type == "symbol":
                    self.ctx.symbol_code(str(fd.default))

    def _total_map(self, mapping, default_rule) -> dict[str, CompiledRule]:
        out = {}
        for t in self.types:
            rule = (mapping or {}).get(t, default_rule)
            out[t] = rule if isinstance(rule, CompiledRule) else compile_rule(rule, self.ctx)
        return out

    def param_values(self, overrides=None) -> list[float]:
        """Parameter vector in slot order, symbols interned to codes."""
        merged = dict(self.params)
        if overrides:
            merged.update({k: v for k, v in overrides.items() if k in merged})
        out = []
        for name in self.param_order:
            v = merged[name]
            if isinstance(v, bool):
                out.append(1.0 if v else 0.0)
            elif isinstance(v, str):
                out.append(float(self.ctx.symbol_code(v)))
            else:
                out.append(float(v))
        return out

    def field_decl(self, type_name: str, field_name: str) -> FieldDecl:
        for fd in self.state_schema[type_name]:
            if fd.name == field_name:
                return fd
        raise GeosimError(f"type {type_name!r} has no field {field_name!r}")

    def default_state(self, type_name: str) -> dict:
        return {fd.name: fd.default for fd in self.state_schema[type_name]}

    def check_record(self, rec: AutomatonRecord) -> None:
        if rec.type not in self.types:
            raise GeosimError(f"automaton {rec.id} has unknown type {rec.type!r}")
        if not self.georef.contains(rec.location):
            raise OutOfBoundsError(
                f"automaton {rec.id} at {rec.location} is outside the georeference")
