"""Synchronous stepping of a geographic automata model.

All three rule maps read the pre-step snapshot and their results are
committed at once, so the outcome is independent of the order automata are
stored or visited. A step that raises leaves the input snapshot untouched;
snapshots are never mutated in place.
"""

from __future__ import annotations

from geosim import kernels
from geosim.errors import OutOfBoundsError, RuleEvalError, StepError
from geosim.gas import geometry, lowering
from geosim.gas.model import GasModel, GasSnapshot, GeoRefConvention, NeighborhoodSpec
from geosim.kernels import ops as K
from geosim.rng import SeededRng


class NeighborhoodView:
    """Resolves a neighborhood against one snapshot for the single-rule
    operations.

    Carries the model, the snapshot, the subject automaton's id, and the
    (tick, rng) pair that seeds any random draws the rule makes. Other
    automata are always seen at their snapshot locations.
    """

    def __init__(self, model: GasModel, snapshot: GasSnapshot, self_id: int,
                 neighbor_ids=None, tick: int | None = None,
                 rng: SeededRng | None = None):
        self.model = model
        self.snapshot = snapshot
        self.self_id = self_id
        self.neighbor_ids = (tuple(sorted(neighbor_ids))
                             if neighbor_ids is not None else None)
        self.tick = snapshot.tick if tick is None else tick
        self.rng = rng or SeededRng(0)
        for nid in self.neighbor_ids or ():
            if nid not in snapshot.automata:
                raise RuleEvalError("<view>", self_id,
                                    f"neighbor {nid} is not in the snapshot")

    def resolved(self) -> tuple:
        if self.neighbor_ids is not None:
            return self.neighbor_ids
        return self.snapshot.automata[self.self_id].neighborhood


def _eval_single(rule, state, location, view, kind):
    model = view.model
    rec = view.snapshot.automata[view.self_id]
    patched = rec.__class__(id=rec.id, type=rec.type,
                            state=dict(state) if state is not None else rec.state,
                            location=tuple(location) if location is not None else rec.location,
                            neighborhood=view.resolved())
    automata = dict(view.snapshot.automata)
    automata[rec.id] = patched
    snap = GasSnapshot(tick=view.snapshot.tick, automata=automata)
    world = lowering.lower(model, snap)
    i = world.index_of[rec.id]
    status, payload = kernels.active.eval_rule(world, rule, i, view.tick,
                                               view.rng.seed)
    if status:
        raise RuleEvalError(rule.name, rec.id, K.STATUS_MESSAGES[status])
    if kind == "transition":
        return lowering.lift_state(model, rec.type, payload)
    if kind == "movement":
        return lowering.lift_location(model, payload[0], payload[1])
    return frozenset(int(world.ids[j]) for j in payload)


def apply_transition(rule, state, location, view: NeighborhoodView):
    """Successor state of one automaton under a transition rule; pure."""
    return _eval_single(rule, state, location, view, "transition")


def apply_movement(rule, state, location, view: NeighborhoodView):
    """Next location under a movement rule, boundary-resolved; pure."""
    return _eval_single(rule, state, location, view, "movement")


def apply_neighborhood(rule, state, location, view: NeighborhoodView):
    """Next neighbor id set under an adjacency rule; never contains the
    subject automaton; pure."""
    return _eval_single(rule, state, location, view, "adjacency")


def neighbors_by_convention(georef: GeoRefConvention, spec: NeighborhoodSpec,
                            location, snapshot: GasSnapshot,
                            exclude=None) -> frozenset:
    """Ids of automata within spec.radius of a location.

    Chebyshev distance for moore, Manhattan for vonneumann, Euclidean
    otherwise; torus lattices measure across the wrap. `exclude` drops the
    querying automaton's own id.
    """
    if not georef.contains(location):
        raise OutOfBoundsError(f"query location {location} is out of bounds")
    out = []
    if georef.kind == "lattice":
        x, y = int(location[0]), int(location[1])
        metric = spec.metric_code
        for rec in snapshot.automata.values():
            d = geometry.lattice_distance(metric, x, y,
                                          int(rec.location[0]), int(rec.location[1]),
                                          georef.width, georef.height, georef.torus)
            if d <= spec.radius and rec.id != exclude:
                out.append(rec.id)
    else:
        x, y = location
        for rec in snapshot.automata.values():
            if (geometry.euclidean(x, y, *rec.location) <= spec.radius
                    and rec.id != exclude):
                out.append(rec.id)
    return frozenset(out)


def step(model: GasModel, snapshot: GasSnapshot, rng: SeededRng,
         params=None) -> GasSnapshot:
    """One synchronous step; returns a fresh snapshot at tick + 1.

    Rule failures are collected across all automata and raised together as
    a StepError; the input snapshot is left unmodified either way.
    """
    world = lowering.lower(model, snapshot, params)
    programs = [(model.transition[t], model.movement[t], model.adjacency[t])
                for t in model.types]
    errors, state_rows, locs, nbrs = kernels.active.run_step(
        world, programs, snapshot.tick, rng.seed)
    if errors:
        failures = [RuleEvalError(name, int(world.ids[i]), K.STATUS_MESSAGES[st])
                    for i, name, st in errors]
        raise StepError(failures)
    return lowering.lift(model, world, snapshot.tick + 1, state_rows, locs, nbrs)
