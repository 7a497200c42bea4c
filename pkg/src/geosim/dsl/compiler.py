"""Compile validated scenario documents into runnable models.

Produces the automata model, the layered environment with its initial
entities, the tick-0 snapshot (stored neighborhoods precomputed per each
type's convention), and the run settings. Placement randomness comes from
streams derived off the run seed, so compiling is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from geosim.agentstate.possibilistic import DesireRule, PossibilisticState
from geosim.agentstate.state import Goal, RoleSpec
from geosim.dsl import doc as D
from geosim.dsl.validate import validate
from geosim.env.model import (
    AgentTypeTau,
    AgentConfig,
    EntitySpec,
    Environment,
    Layer,
    ObjectType,
)
from geosim.env.ops import create_entity
from geosim.errors import CompileError
from geosim.gas.kernel import neighbors_by_convention
from geosim.gas.model import (
    AutomatonRecord,
    GasModel,
    GasSnapshot,
    GeoRefConvention,
)
from geosim.rng import SeededRng
from geosim.rules.eval import EvalContext, evaluate

DEFAULT_GEOREF = GeoRefConvention("lattice", 10, 10, "clamp")


@dataclass(frozen=True)
class RunSettings:
    seed: int = 0
    ticks: int = 10
    stride: int = 1
    output: str = "records"
    dump_agents: bool = False


@dataclass
class CompiledScenario:
    model: GasModel
    environment: Environment
    snapshot: GasSnapshot
    settings: RunSettings
    doc: D.ScenarioDoc = None


def _agent_config(block: D.AgentBlock) -> AgentConfig:
    goals = tuple(Goal(g.name, g.kind, g.condition) for g in block.goals)
    possibilistic = None
    if block.possibilistic is not None:
        pb = block.possibilistic
        possibilistic = PossibilisticState(
            pi={w: float(v) for w, v in pb.pi},
            desire_rules=tuple(DesireRule(guard, goal, frozenset(worlds))
                               for goal, guard, worlds in pb.desires))
    return AgentConfig(
        goals=goals,
        preferences={g: float(u) for g, u in block.prefers},
        plans=tuple(block.plans),
        max_intentions=block.intentions if block.intentions is not None else 1,
        mind=block.mind,
        roles=tuple(RoleSpec(r.name, frozenset(r.goals), r.description)
                    for r in block.roles),
        use_cases=tuple(block.use_cases),
        possibilistic=possibilistic,
    )


def _assign_state(defaults, assigns, params, rng, subject):
    state = dict(defaults)
    ctx = EvalContext(params=params, self_state=state, rng=rng,
                      subject=subject, tick=0, rule_name="place")
    for fname, expr in assigns:
        state[fname] = evaluate(expr, ctx)
    return state


def compile_doc(doc: D.ScenarioDoc) -> CompiledScenario:
    """Compile a document; documents with validation errors are rejected."""
    report = validate(doc)
    if not report.ok:
        raise CompileError(
            "cannot compile a document with validation errors:\n" + str(report))

    georef = doc.georef or DEFAULT_GEOREF
    rules = {r.name: r for r in doc.rules}
    env_params = {name: value for name, value in doc.env.params}

    model = GasModel(
        types=[a.name for a in doc.automata],
        state_schema={a.name: a.fields for a in doc.automata},
        georef=georef,
        transition={a.name: rules[a.transition]
                    for a in doc.automata if a.transition},
        movement={a.name: rules[a.movement]
                  for a in doc.automata if a.movement},
        adjacency={a.name: rules[a.adjacency]
                   for a in doc.automata if a.adjacency},
        neighborhood_spec={a.name: a.spec for a in doc.automata},
        params=env_params,
    )

    agent_types = {}
    for block in doc.agents:
        agent_types[block.name] = AgentTypeTau(
            name=block.name,
            state_schema=block.fields,
            shapes=block.shapes,
            actions=block.actions,
            perception_fns=tuple(rules[n] for n in block.perceive),
            decision_fns=tuple(rules[n] for n in block.decide),
            agreement_fns=tuple(rules[n] for n in block.agree),
            config=_agent_config(block),
        )
    object_types = {b.name: ObjectType(b.name, b.fields) for b in doc.objects}

    environment = Environment(
        georef=georef,
        params=dict(env_params),
        functions=doc.env.functions,
        layers=tuple(Layer(l.name, {n: v for n, v in l.params}, l.functions)
                     for l in doc.layers),
        agent_types=agent_types,
        object_types=object_types,
    )

    settings = RunSettings(doc.run.seed, doc.run.ticks, doc.run.stride,
                           doc.run.output, doc.run.dump_agents)
    rng = SeededRng(settings.seed)
    all_params = dict(env_params)
    for layer in environment.layers:
        all_params.update(layer.params)

    # -- automata placement ------------------------------------------------

    automata: dict[int, AutomatonRecord] = {}
    schema_by_type = {a.name: a.fields for a in doc.automata}
    occupied = set()
    next_aid = 0
    for idx, p in enumerate(doc.places):
        if p.type_name not in schema_by_type:
            continue
        defaults = {fd.name: fd.default for fd in schema_by_type[p.type_name]}
        stream = rng.stream("place", idx)
        if p.at is not None:
            spots = [(int(p.at[0]), int(p.at[1])) if georef.kind == "lattice"
                     else (p.at[0], p.at[1])]
        elif georef.kind == "lattice":
            cells = [c for c in range(georef.width * georef.height)
                     if c not in occupied]
            stream.shuffle(cells)
            take = sorted(cells[:p.count])
            if len(take) < p.count:
                raise CompileError(
                    f"not enough vacant cells for {p.count} {p.type_name}")
            spots = [(c % georef.width, c // georef.width) for c in take]
        else:
            x0, y0, x1, y1 = georef.box
            spots = [(x0 + stream.uniform() * (x1 - x0),
                      y0 + stream.uniform() * (y1 - y0))
                     for _ in range(p.count)]
        for loc in spots:
            state = _assign_state(defaults, p.assigns, all_params, rng, next_aid)
            automata[next_aid] = AutomatonRecord(
                next_aid, p.type_name, state, loc)
            if georef.kind == "lattice":
                occupied.add(loc[1] * georef.width + loc[0])
            next_aid += 1

    bare = GasSnapshot(0, automata)
    if automata:
        automata = {
            rec.id: AutomatonRecord(
                rec.id, rec.type, rec.state, rec.location,
                neighbors_by_convention(
                    georef, model.neighborhood_spec[rec.type],
                    rec.location, bare, exclude=rec.id))
            for rec in automata.values()
        }
    snapshot = GasSnapshot(0, automata)

    # -- entity placement ---------------------------------------------------

    for p in doc.places:
        if p.type_name in schema_by_type:
            continue
        if p.type_name in agent_types:
            kind = "agent"
            schema = agent_types[p.type_name].state_schema
            shape = agent_types[p.type_name].shapes[0]
        else:
            kind = "object"
            schema = object_types[p.type_name].state_schema
            shape = ("point",)
        layer_name = p.layer or environment.layers[0].name
        defaults = {fd.name: fd.default for fd in schema}
        count = 1 if p.at is not None else p.count
        for _ in range(count):
            state = _assign_state(defaults, p.assigns, all_params, rng,
                                  environment.next_id)
            loc = None
            if p.at is not None:
                loc = ((int(p.at[0]), int(p.at[1]))
                       if georef.kind == "lattice" else tuple(p.at))
            spec = EntitySpec(kind, p.type_name, state, loc, shape)
            environment, _eid = create_entity(environment, layer_name, spec, rng)

    return CompiledScenario(model, environment, snapshot, settings, doc)
