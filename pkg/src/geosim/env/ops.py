"""Environment operations: lifecycle, perception, decision, agreement,
and the per-tick parameter functions.

All of these treat the environment as a value and hand back a new one
where they change anything.
"""

from __future__ import annotations

from dataclasses import replace

from geosim.agentstate.state import ActionIntent, Commitment
from geosim.agentstate import state as agentstate
from geosim.env.model import Entity, EntitySpec, Environment, Layer
from geosim.errors import (
    GeosimError,
    InadmissibleShapeError,
    OutOfBoundsError,
    UnknownIdError,
    UnknownLayerError,
)
from geosim.gas import geometry
from geosim.percepts import Percept
from geosim.rng import SeededRng
from geosim.rules.eval import EvalContext, evaluate, holds


def _admissible(env: Environment, spec: EntitySpec) -> bool:
    if spec.kind != "agent":
        return True
    tau = env.agent_types.get(spec.type_name)
    if tau is None:
        raise GeosimError(f"unknown agent type {spec.type_name!r}")
    return spec.shape in tau.shapes


def _random_location(env: Environment, rng: SeededRng, eid: int):
    g = env.georef
    stream = rng.stream("create", eid)
    if g.kind == "lattice":
        return (stream.below(g.width), stream.below(g.height))
    x0, y0, x1, y1 = g.box
    return (x0 + stream.uniform() * (x1 - x0), y0 + stream.uniform() * (y1 - y0))


def create_entity(env: Environment, layer_name: str, spec: EntitySpec,
                  rng: SeededRng):
    """Allocate the next id and place the entity on the named layer."""
    if not env.has_layer(layer_name):
        raise UnknownLayerError(f"unknown layer {layer_name!r}")
    if not _admissible(env, spec):
        raise InadmissibleShapeError(
            f"shape {spec.shape!r} not admissible for type {spec.type_name!r}")
    eid = env.next_id
    location = spec.location
    if location is None:
        location = _random_location(env, rng, eid)
    if not env.georef.contains(location):
        raise OutOfBoundsError(f"location {location} outside the georeference")
    ent = Entity(id=eid, kind=spec.kind, type_name=spec.type_name,
                 state=dict(spec.state), location=tuple(location),
                 shape=spec.shape)
    layer = env.layer(layer_name)
    entities = dict(layer.entities)
    entities[eid] = ent
    out = env.with_layer(replace(layer, entities=entities))
    return replace(out, next_id=eid + 1), eid


def destroy_entity(env: Environment, eid: int) -> Environment:
    """Remove an entity and purge its id from every observed set.

    Destroyed ids are never reused: the allocation counter only grows.
    """
    home, ent = env.find(eid)
    if ent is None:
        raise UnknownIdError(f"unknown entity id {eid}")
    layers = []
    for layer in env.layers:
        entities = {}
        changed = False
        for oid, other in layer.entities.items():
            if oid == eid:
                changed = True
                continue
            if eid in other.observed:
                other = replace(other, observed=other.observed - {eid})
                changed = True
            entities[oid] = other
        layers.append(replace(layer, entities=entities) if changed else layer)
    return replace(env, layers=tuple(layers))


def _distance(georef, a, b) -> float:
    if georef.kind == "lattice":
        return geometry.lattice_distance(
            geometry.METRIC_NAMES["moore"], int(a[0]), int(a[1]),
            int(b[0]), int(b[1]), georef.width, georef.height, georef.torus)
    return geometry.euclidean(a[0], a[1], b[0], b[1])


def perceive(env: Environment, agent_id: int, tick: int = 0,
             rng: SeededRng | None = None) -> list[Percept]:
    """Evaluate the agent type's perception functions in order.

    Entity sightings come first, sorted by source id then function order;
    parameter readings follow, sorted by name then function order.
    """
    layer, agent = env.find(agent_id)
    if agent is None:
        raise UnknownIdError(f"unknown entity id {agent_id}")
    if agent.kind != "agent":
        raise GeosimError(f"entity {agent_id} is not an agent")
    tau = env.agent_types[agent.type_name]
    params = env.merged_params(layer)

    entity_hits = []   # (source id, fn index, percept)
    param_hits = []    # (name, fn index, percept)
    for fn_idx, rule in enumerate(tau.perception_fns):
        if rule.sense == "param":
            if rule.param not in params:
                raise GeosimError(
                    f"perception rule {rule.name!r} reads unknown parameter "
                    f"{rule.param!r}")
            param_hits.append((rule.param, fn_idx, Percept(
                "param", rule.param, params[rule.param])))
            continue
        ctx = EvalContext(params=params, self_state=agent.state,
                          rng=rng, subject=agent_id, tick=tick,
                          rule_name=rule.name)
        radius = evaluate(rule.radius, ctx)
        for other_layer, other in env.entities():
            if other.id == agent_id:
                continue
            d = _distance(env.georef, agent.location, other.location)
            if d > radius:
                continue
            percept = Percept("entity", other.type_name, other.id,
                              source=other.id, distance=d,
                              location=other.location)
            if rule.where is not None and not holds(rule.where, ctx, other=percept):
                continue
            entity_hits.append((other.id, fn_idx, percept))
    entity_hits.sort(key=lambda t: (t[0], t[1]))
    param_hits.sort(key=lambda t: (t[0], t[1]))
    return [p for _, _, p in entity_hits] + [p for _, _, p in param_hits]


def _action_ctx(entity, percepts, params, beliefs, rng, tick, rule_name):
    return EvalContext(params=params, self_state=entity.state,
                       beliefs=beliefs, percepts=percepts, rng=rng,
                       subject=entity.id, tick=tick, rule_name=rule_name)


def decide(agent_state, percepts, tau, rng: SeededRng, *, entity=None,
           params=None, tick: int = 0, mind=None, skills=None):
    """Reflex decision rules plus, when a mind is attached, plan steps.

    Returns (updated internal state, intents). Every intent names an
    action of the type whose precondition holds against the current
    state and percepts.
    """
    params = params or {}
    beliefs = agent_state.beliefs
    intents: list[ActionIntent] = []

    def precondition_holds(spec) -> bool:
        if spec.precondition is None:
            return True
        ctx = _action_ctx(entity, percepts, params, beliefs, rng, tick,
                          f"pre:{spec.name}")
        return holds(spec.precondition, ctx)

    new_state = agent_state
    if mind is not None and skills is not None:
        def planner(goal):
            from geosim.minds.pipeline import plan as mind_plan
            mems = getattr(mind, "memories", [])
            return mind_plan(mind, goal, mems, skills,
                             agent=entity.id if entity else 0, tick=tick)

        new_state, plan_intents = agentstate.plan_and_execute(
            agent_state, skills, percepts, rng, tick,
            planner=planner, precond=precondition_holds)
        intents.extend(plan_intents)

    for rule in tau.decision_fns:
        ctx = _action_ctx(entity, percepts, params, beliefs, rng, tick, rule.name)
        if rule.when is not None and not holds(rule.when, ctx):
            continue
        spec = tau.action(rule.action)
        if spec is None:
            raise GeosimError(f"decision rule {rule.name!r} names unknown "
                              f"action {rule.action!r}")
        if precondition_holds(spec):
            intents.append(ActionIntent(rule.action))
    return new_state, intents


def agree(env: Environment, proposals, tick: int = 0,
          commitment_seq: int = 0) -> list[Commitment]:
    """Bind joint-action proposals pairwise.

    For every agreement rule naming an action, proposers of that action
    are sorted by id and bound two at a time; an odd proposer out stays
    unbound, as do proposals nobody's agreement functions cover.
    """
    for eid, _intent in proposals:
        if env.find(eid)[1] is None:
            raise UnknownIdError(f"proposal from unknown entity {eid}")

    paired_actions = []
    for tau in env.agent_types.values():
        for rule in tau.agreement_fns:
            if rule.action not in paired_actions:
                paired_actions.append(rule.action)

    commitments: list[Commitment] = []
    seq = commitment_seq
    for action in paired_actions:
        proposers = sorted({eid for eid, intent in proposals
                            if intent.action == action})
        for a, b in zip(proposers[0::2], proposers[1::2]):
            commitments.append(Commitment(
                id=seq, members=frozenset({a, b}),
                goal=f"{action}#{seq}", origin_tick=tick))
            seq += 1
    return commitments


def apply_global_functions(env: Environment, tick: int = 0) -> Environment:
    """Run global then per-layer parameter functions in declaration order.

    Functions update parameters only; entities are untouched. Each
    assignment sees the values produced by the assignments before it.
    """
    params = dict(env.params)
    for fn in env.functions:
        for pname, expr in fn.assigns:
            ctx = EvalContext(params=params, tick=tick, rule_name=fn.name)
            params[pname] = evaluate(expr, ctx)
    layers = []
    for layer in env.layers:
        lp = dict(layer.params)
        merged = {**params, **lp}
        changed = False
        for fn in layer.functions:
            for pname, expr in fn.assigns:
                ctx = EvalContext(params=merged, tick=tick, rule_name=fn.name)
                value = evaluate(expr, ctx)
                merged[pname] = value
                if pname in lp or pname not in params:
                    lp[pname] = value
                    changed = True
        layers.append(replace(layer, params=lp) if changed else layer)
    return replace(env, params=params, layers=tuple(layers))
