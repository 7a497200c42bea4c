"""Drives one simulation run.

Each integer tick rides on one scheduler event and executes a fixed phase
order: perceive, mind/decide, agree, commit actions, automata step,
environment functions. Perception therefore always reflects the world as
committed at the end of the previous tick, matching the synchronous step
semantics. Targeted events delivered between ticks mark their agent
addressed for the next activation check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from geosim import kernels
from geosim.agentstate import possibilistic as poss
from geosim.agentstate import state as agentstate
from geosim.devs import Clock, EventQueue, run_until, schedule
from geosim.dsl.compiler import CompiledScenario
from geosim.env import model as envm
from geosim.env import ops as envops
from geosim.errors import GeosimError
from geosim.gas import geometry
from geosim.gas.kernel import step as gas_step
from geosim.minds import (
    ExternalMind,
    HttpTransport,
    MemoryStore,
    PipeTransport,
    QuerySpec,
    ReplayLog,
    ScriptedMind,
    load_transcript,
    memory_retrieve,
    perceive_text,
)
from geosim.minds.pipeline import plan as mind_plan
from geosim.rng import SeededRng
from geosim.rules import ast as R
from geosim.rules.eval import EvalContext, evaluate, holds
from geosim.sim import trajectory


@dataclass
class AgentRuntime:
    entity_id: int
    tau: envm.AgentTypeTau
    state: agentstate.AgentInternalState
    skills: agentstate.SkillSet
    memory: MemoryStore
    mind: object | None = None
    possibilistic: poss.PossibilisticState | None = None
    addressed: bool = False


@dataclass
class RunSummary:
    final_tick: int
    automata: int
    entities: int
    backend: str


def build_mind(decl, replay_log_path=None, endpoint_override=None):
    """Instantiate a scenario mind declaration; None means the declared
    plan library is the only planner."""
    if decl is None or decl.kind == "rule_based":
        return None
    if decl.kind == "scripted":
        return ScriptedMind(load_transcript(decl.target))
    target = endpoint_override or decl.target
    transport = (decl.transport if endpoint_override is None
                 else ("http" if target.startswith("http") else "pipe"))
    log = ReplayLog(replay_log_path) if replay_log_path else None
    if transport == "http":
        return ExternalMind(HttpTransport(target), log=log)
    return ExternalMind(PipeTransport(target.split()), log=log)


class _PlannerShim:
    """Presents a planner callable through the mind-backend interface."""

    def __init__(self, planner):
        self._planner = planner
        self.memories = []

    def plan_steps(self, goal, memories, capabilities, *, agent=0, tick=0):
        plan_obj = self._planner(goal)
        return () if plan_obj is None else plan_obj.steps


class Simulation:
    def __init__(self, compiled: CompiledScenario, *, seed=None, ticks=None,
                 stride=None, replay_log_path=None, endpoint_override=None,
                 dump_agents=None, collect_event_trace=False):
        s = compiled.settings
        self.model = compiled.model
        self.env = compiled.environment
        self.snapshot = compiled.snapshot
        self.seed = s.seed if seed is None else seed
        self.ticks = s.ticks if ticks is None else ticks
        self.stride = s.stride if stride is None else stride
        self.dump_agents = s.dump_agents if dump_agents is None else dump_agents
        self.rng = SeededRng(self.seed)
        self.lines: list[str] = []
        self.event_lines: list[str] = []
        self.collect_event_trace = collect_event_trace
        self.diagnostics: list[str] = []
        self.queue = EventQueue()
        self.clock = Clock()
        self._commit_done: dict[int, set] = {}
        self._commit_seq = 0

        self.agents: dict[int, AgentRuntime] = {}
        for _layer, ent in self.env.entities():
            if ent.kind != "agent":
                continue
            tau = self.env.agent_types[ent.type_name]
            cfg = tau.config
            self.agents[ent.id] = AgentRuntime(
                entity_id=ent.id,
                tau=tau,
                state=agentstate.AgentInternalState(
                    goals=cfg.goals, preferences=dict(cfg.preferences)),
                skills=agentstate.SkillSet(abilities=tau.decision_fns,
                                    capabilities=tau.actions),
                memory=MemoryStore(),
                mind=build_mind(cfg.mind, replay_log_path, endpoint_override),
                possibilistic=cfg.possibilistic,
            )
        self._plan_library = {
            eid: dict(rt.tau.config.plans) for eid, rt in self.agents.items()
        }

    # -- expression contexts ------------------------------------------------

    def _agent_ctx(self, rt: AgentRuntime, ent, percepts, tick, name):
        layer, _ = self.env.find(rt.entity_id)
        return EvalContext(params=self.env.merged_params(layer),
                           self_state=ent.state, beliefs=rt.state.beliefs,
                           percepts=percepts, rng=self.rng,
                           subject=rt.entity_id, tick=tick, rule_name=name)

    def _condition_checker(self, rt, ent, percepts, tick):
        def check(goal):
            if goal.condition is None:
                return False
            ctx = self._agent_ctx(rt, ent, percepts, tick, f"goal:{goal.id}")
            return holds(goal.condition, ctx)
        return check

    def _planner(self, rt: AgentRuntime, tick):
        library = self._plan_library[rt.entity_id]

        def planner(goal):
            if goal.id in library:
                return agentstate.Plan(goal.id, tuple(library[goal.id]), 0)
            base = goal.id.split("#", 1)[0]
            if "#" in goal.id and rt.tau.action(base) is not None:
                return agentstate.Plan(goal.id, (base,), 0)
            if rt.mind is not None:
                mems = memory_retrieve(
                    rt.memory, QuerySpec(keywords=tuple(goal.id.split("_"))),
                    3, tick)
                return mind_plan(rt.mind, goal, mems, rt.skills,
                                 agent=rt.entity_id, tick=tick)
            return None
        return planner

    def _elect_possibilistic(self, rt: AgentRuntime, ent, percepts, tick):
        ps = rt.possibilistic
        candidates = {r.goal for r in ps.desire_rules}
        ctx = self._agent_ctx(rt, ent, percepts, tick, "possibilistic")
        _j, g_star, _pi = poss.elect_goals_possibilistic(
            ps, candidates, guard_eval=lambda guard: holds(guard, ctx))
        goals = tuple(
            replace(g, active=(g.id in g_star)) if g.id in candidates else g
            for g in rt.state.goals)
        dropped = candidates - g_star
        rt.state = replace(rt.state, goals=goals,
                           intentions=tuple(i for i in rt.state.intentions
                                            if i not in dropped))

    # -- action execution ---------------------------------------------------

    def _apply_intent(self, rt: AgentRuntime, intent, tick):
        layer, ent = self.env.find(rt.entity_id)
        spec = rt.tau.action(intent.action)
        if spec is None:
            raise GeosimError(f"intent names unknown action {intent.action!r}")
        ctx = self._agent_ctx(rt, ent, [], tick, f"effect:{intent.action}")
        new_state = dict(ent.state)
        for fname, expr in spec.effects:
            new_state[fname] = evaluate(expr, ctx)
        new_loc = ent.location
        if spec.move is not None:
            new_loc = self._entity_move(spec.move, ent, ctx)
        new_ent = replace(ent, state=new_state, location=new_loc)
        self.env = self.env.with_layer(
            replace(layer, entities={**layer.entities, ent.id: new_ent}))

    def _entity_move(self, node, ent, ctx):
        g = self.env.georef
        if isinstance(node, R.LocStay):
            return ent.location
        if isinstance(node, R.LocIf):
            branch = node.then if holds(node.cond, ctx) else node.orelse
            return self._entity_move(branch, ent, ctx)
        if isinstance(node, (R.LocJump, R.LocStep)):
            if isinstance(node, R.LocJump):
                x = evaluate(node.x, ctx)
                y = evaluate(node.y, ctx)
            else:
                x = ent.location[0] + evaluate(node.dx, ctx)
                y = ent.location[1] + evaluate(node.dy, ctx)
            if g.kind == "lattice":
                if x != math.floor(x) or y != math.floor(y):
                    ctx.fail("movement produced a non-integer lattice coordinate")
                return geometry.resolve_lattice(int(x), int(y), g.width,
                                                g.height, g.torus)
            return geometry.resolve_continuous(x, y, *g.box, g.torus)
        if isinstance(node, R.LocRandomVacant):
            occupied = {(int(e.location[0]), int(e.location[1]))
                        for _l, e in self.env.entities()}
            cells = [(x, y) for y in range(g.height) for x in range(g.width)
                     if (x, y) not in occupied]
            if node.radius is not None:
                r = evaluate(node.radius, ctx)
                cells = [(x, y) for x, y in cells
                         if geometry.lattice_distance(
                             geometry.METRIC_NAMES["moore"],
                             int(ent.location[0]), int(ent.location[1]),
                             x, y, g.width, g.height, g.torus) <= r]
            if not cells:
                return ent.location
            return cells[ctx.stream(node.stream).below(len(cells))]
        raise GeosimError(f"bad movement node {type(node).__name__}")

    # -- phases ---------------------------------------------------------

    def _agent_phase(self, tick: int):
        proposals = []
        for eid in sorted(self.agents):
            rt = self.agents[eid]
            _layer, ent = self.env.find(eid)
            percepts = envops.perceive(self.env, eid, tick, self.rng)
            observed = frozenset(p.source for p in percepts
                                 if p.kind == "entity")
            if observed != ent.observed:
                ent = replace(ent, observed=observed)
                self.env = self.env.with_layer(replace(
                    _layer, entities={**_layer.entities, eid: ent}))
            rt.state = agentstate.update_beliefs(rt.state, percepts, tick)
            obs = perceive_text(percepts, tick=tick, agent=eid)
            if rt.mind is not None:
                narrated = rt.mind.perceive(obs.text, agent=eid, tick=tick)
                if narrated is not None:
                    obs = replace(obs, text=narrated)
            rt.memory.append(obs, now=tick)

            if rt.possibilistic is not None:
                self._elect_possibilistic(rt, ent, percepts, tick)
            checker = self._condition_checker(rt, ent, percepts, tick)
            rt.state = agentstate.refresh_goals(rt.state, checker)

            # exhausted plans are dropped so their goals can replan
            live = {k: p for k, p in rt.state.plans.items() if p.pending}
            if len(live) != len(rt.state.plans):
                rt.state = replace(rt.state, plans=live)

            addressed = rt.addressed
            rt.addressed = False
            if agentstate.activate(rt.state, agentstate.ActivationEvent(tick, addressed),
                            holds=checker) == agentstate.SKIP:
                continue
            chosen = agentstate.select_intentions(rt.state, rt.tau.config.max_intentions)
            rt.state = replace(rt.state, intentions=tuple(chosen))

            try:
                rt.state, intents = envops.decide(
                    rt.state, percepts, rt.tau, self.rng, entity=ent,
                    params=self.env.merged_params(_layer), tick=tick,
                    mind=_PlannerShim(self._planner(rt, tick)),
                    skills=rt.skills)
            except agentstate.PlanningError as exc:
                self.diagnostics.append(f"tick {tick}: agent {eid}: {exc}")
                try:
                    rt.state = agentstate.record_history(rt.state, percepts, (), tick)
                except GeosimError:
                    pass
                continue
            proposals.extend((eid, intent) for intent in intents)

        for c in envops.agree(self.env, proposals, tick, self._commit_seq):
            self._commit_seq += 1
            self._commit_done[c.id] = set()
            for member in sorted(c.members):
                rt = self.agents[member]
                rt.state = replace(
                    rt.state,
                    goals=rt.state.goals + (agentstate.Goal(c.goal, "achievement"),),
                    commitments=rt.state.commitments + (c,))

        for eid, intent in proposals:
            self._apply_intent(self.agents[eid], intent, tick)
            for c in self.agents[eid].state.commitments:
                if c.goal == intent.goal or c.goal.split("#")[0] == intent.action:
                    self._commit_done[c.id].add(eid)
        self._discharge_commitments()

    def _discharge_commitments(self):
        for cid, done in list(self._commit_done.items()):
            owners = [rt for rt in self.agents.values()
                      if any(c.id == cid for c in rt.state.commitments)]
            if not owners:
                self._commit_done.pop(cid)
                continue
            members = next(c.members for c in owners[0].state.commitments
                           if c.id == cid)
            if done >= members:
                for rt in owners:
                    commitment = next(c for c in rt.state.commitments
                                      if c.id == cid)
                    rt.state = replace(
                        rt.state,
                        goals=tuple(replace(g, active=False)
                                    if g.id == commitment.goal else g
                                    for g in rt.state.goals),
                        intentions=tuple(i for i in rt.state.intentions
                                         if i != commitment.goal),
                        commitments=tuple(c for c in rt.state.commitments
                                          if c.id != cid))
                self._commit_done.pop(cid)

    def _tick(self, tick: int):
        if self.agents:
            self._agent_phase(tick)
        self.snapshot = gas_step(self.model, self.snapshot, self.rng,
                                 params=self.env.params)
        self.env = envops.apply_global_functions(self.env, tick)
        done = self.snapshot.tick
        if done % self.stride == 0 or done == self.ticks:
            self._record(done)

    def schedule_message(self, time: float, agent_id: int):
        """Queue a targeted event delivered before the tick at its time."""
        schedule(self.queue, self.clock, float(time), priority=-1,
                 payload=("message", agent_id))

    # -- output -------------------------------------------------------------

    def _record(self, tick: int):
        for layer in self.env.layers:
            if layer.params:
                self.lines.append(trajectory.layer_line(tick, layer.name,
                                                        layer.params))
        self.lines.extend(trajectory.snapshot_lines(self.model, self.snapshot))
        for _layer, ent in self.env.entities():
            self.lines.append(trajectory.entity_line(
                tick, ent, self.env.schema_of(ent)))
        if self.dump_agents:
            for eid in sorted(self.agents):
                self.lines.append(trajectory.agent_state_line(
                    tick, eid, self.agents[eid].state))

    def run(self, header: str | None = None) -> RunSummary:
        if header is not None:
            self.lines.append(header)

        def handler(ev, queue, clock):
            if isinstance(ev.payload, tuple) and ev.payload[0] == "message":
                if ev.payload[1] in self.agents:
                    self.agents[ev.payload[1]].addressed = True
                return
            t = int(ev.time)
            self._tick(t)
            if t + 1 < self.ticks:
                schedule(queue, clock, float(t + 1), payload="tick")

        if self.ticks > 0:
            schedule(self.queue, self.clock, 0.0, payload="tick")
        trace = run_until(self.queue, self.clock,
                          float(max(self.ticks - 1, 0)), handler)
        if self.collect_event_trace:
            self.event_lines = [trajectory.event_line(ev) for ev in trace]
        return RunSummary(self.snapshot.tick,
                          len(self.snapshot.automata),
                          sum(1 for _ in self.env.entities()),
                          kernels.BACKEND_NAME)
