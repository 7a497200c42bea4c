"""Agent internal state and its dynamics.

The structures here hold what an agent is made of on the inside: beliefs
with freshness stamps, maintenance and achievement goals, intentions,
ranked preferences, commitments taken on with other agents, step-cursor
plans, and an append-only history of what was perceived and done.

Every operation is pure: it returns a new state and never touches the
one passed in.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from geosim.errors import GeosimError, NonIncreasingTickError, BackendError

RUN = "run"
SKIP = "skip"


@dataclass(frozen=True)
class Goal:
    id: str
    kind: str                    # 'maintenance' | 'achievement'
    condition: object = None     # rule expression; evaluation is contextual
    active: bool = True

    def __post_init__(self):
        if self.kind not in ("maintenance", "achievement"):
            raise GeosimError(f"goal {self.id!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Commitment:
    id: int
    members: frozenset
    goal: str
    origin_tick: int


@dataclass(frozen=True)
class Plan:
    id: str
    steps: tuple = ()            # action names
    cursor: int = 0

    def __post_init__(self):
        if not 0 <= self.cursor <= len(self.steps):
            raise GeosimError(f"plan {self.id!r}: cursor out of range")

    @property
    def pending(self) -> bool:
        return self.cursor < len(self.steps)


@dataclass(frozen=True)
class HistoryRecord:
    tick: int
    percepts: tuple = ()
    actions: tuple = ()


@dataclass(frozen=True)
class ActionSpec:
    name: str
    joint: bool = False
    precondition: object = None  # rule expression; None means always true
    effects: tuple = ()          # ((field, expr), ...)
    move: object = None          # optional movement expression


@dataclass(frozen=True)
class ActionIntent:
    action: str
    goal: str | None = None
    plan: str | None = None


@dataclass(frozen=True)
class SkillSet:
    """Interface of the agent: reflex abilities and preconditioned actions."""

    abilities: tuple = ()        # decision rules (condition -> action name)
    capabilities: tuple = ()     # ActionSpec

    def __post_init__(self):
        names = {a.name for a in self.capabilities}
        for ab in self.abilities:
            if ab.action not in names:
                raise GeosimError(
                    f"ability targets unknown capability {ab.action!r}")

    def capability(self, name: str) -> ActionSpec | None:
        for a in self.capabilities:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class RoleSpec:
    name: str
    goals: frozenset = frozenset()
    use_case: str = ""


@dataclass(frozen=True)
class ActivationEvent:
    tick: int
    addressed: bool = False


@dataclass(frozen=True)
class AgentInternalState:
    beliefs: dict = field(default_factory=dict)   # key -> (value, tick)
    goals: tuple = ()
    intentions: tuple = ()                        # goal ids, pre-selected
    preferences: dict = field(default_factory=dict)  # goal id -> utility
    commitments: tuple = ()
    plans: dict = field(default_factory=dict)     # plan id -> Plan
    history: tuple = ()

    def __post_init__(self):
        goal_ids = {g.id for g in self.goals}
        for gid in self.intentions:
            if gid not in goal_ids:
                raise GeosimError(f"intention {gid!r} is not a held goal")
        for gid in self.preferences:
            if gid not in goal_ids:
                raise GeosimError(f"preference for undeclared goal {gid!r}")

    def goal(self, gid: str) -> Goal | None:
        for g in self.goals:
            if g.id == gid:
                return g
        return None

    def active_goals(self) -> list[Goal]:
        return [g for g in self.goals if g.active]

    def committed_goal_ids(self) -> set:
        return {c.goal for c in self.commitments}


class PlanningError(GeosimError):
    """The mind backend failed for this tick; no actions were emitted."""

    def __init__(self, tick: int, cause: Exception):
        self.tick = tick
        self.cause = cause
        super().__init__(f"planning failed at tick {tick}: {cause}")


def update_beliefs(state: AgentInternalState, percepts, tick: int) -> AgentInternalState:
    """Fold percepts into beliefs, most recent value winning per key.

    Parameter percepts write their own key; entity sightings are
    aggregated into one 'seen_<type>' count per observed type.
    """
    if state.history and tick < state.history[-1].tick:
        raise NonIncreasingTickError(
            f"belief update at tick {tick} behind history")
    beliefs = dict(state.beliefs)
    seen: dict[str, int] = {}
    for p in percepts:
        if p.kind == "param":
            beliefs[p.key] = (p.value, tick)
        else:
            seen[p.key] = seen.get(p.key, 0) + 1
    for key, count in seen.items():
        beliefs[f"seen_{key}"] = (float(count), tick)
    return replace(state, beliefs=beliefs)


def refresh_goals(state: AgentInternalState, holds) -> AgentInternalState:
    """Deactivate achievement goals whose condition now holds.

    Maintenance goals express a standing relationship and are never
    deactivated here. `holds(goal) -> bool` evaluates a goal condition in
    the caller's context.
    """
    out = []
    for g in state.goals:
        if g.kind == "achievement" and g.active and holds(g):
            g = replace(g, active=False)
        out.append(g)
    dropped = {g.id for g in out if not g.active}
    return replace(state, goals=tuple(out),
                   intentions=tuple(i for i in state.intentions if i not in dropped))


def activate(state: AgentInternalState, event: ActivationEvent,
             holds=None) -> str:
    """Decide whether the agent takes a turn this tick.

    Runs when: a maintenance goal is violated, an achievement goal is
    active, a plan has pending steps, or an event is addressed to the
    agent. `holds(goal) -> bool` checks maintenance conditions; without
    one a maintenance goal alone does not force a run.
    """
    for g in state.goals:
        if not g.active:
            continue
        if g.kind == "maintenance":
            if holds is not None and not holds(g):
                return RUN
        else:
            return RUN
    if any(p.pending for p in state.plans.values()):
        return RUN
    if event.addressed:
        return RUN
    return SKIP


def _utility_scale(preferences: dict) -> float:
    scale = max((abs(u) for u in preferences.values()), default=0.0)
    return scale if scale > 0.0 else 1.0


def select_intentions(state: AgentInternalState, max_k: int,
                      commitment_bonus: float = 0.5) -> list[str]:
    """Pick the top-k active goals by utility as this tick's intentions.

    Goals injected by live commitments get `commitment_bonus` scaled by
    the largest utility magnitude, so ranking is invariant under positive
    rescaling of the preference table. Ties break toward smaller goal ids.
    """
    if max_k < 0:
        raise GeosimError("max_k must be non-negative")
    scale = _utility_scale(state.preferences)
    committed = state.committed_goal_ids()
    ranked = sorted(
        state.active_goals(),
        key=lambda g: (-(state.preferences.get(g.id, 0.0)
                         + (commitment_bonus * scale if g.id in committed else 0.0)),
                       g.id))
    return [g.id for g in ranked[:max_k]]


def plan_and_execute(state: AgentInternalState, skills: SkillSet, percepts,
                     rng, tick: int, planner=None, precond=None):
    """Advance plans for the selected intentions and emit this tick's steps.

    Intentions without a live plan get one from `planner(goal) -> Plan`
    (the attached mind backend). Each live plan emits at most its cursor
    step, and only when the action's capability precondition passes
    `precond(action_spec) -> bool`; the cursor advances only on emission.
    A planner failure raises PlanningError and the tick emits nothing.
    """
    plans = dict(state.plans)
    intents: list[ActionIntent] = []
    for gid in state.intentions:
        goal = state.goal(gid)
        if goal is None or not goal.active:
            continue
        plan = plans.get(gid)
        if plan is None and planner is not None:
            try:
                synthesized = planner(goal)
            except BackendError as exc:
                raise PlanningError(tick, exc) from exc
            if synthesized is not None:
                for step_name in synthesized.steps:
                    if skills.capability(step_name) is None:
                        raise PlanningError(
                            tick, BackendError(
                                f"plan step {step_name!r} outside capabilities"))
                plan = synthesized
                plans[gid] = plan
        if plan is None or not plan.pending:
            continue
        action_name = plan.steps[plan.cursor]
        spec = skills.capability(action_name)
        if spec is None:
            raise PlanningError(
                tick, BackendError(f"plan step {action_name!r} outside capabilities"))
        if precond is None or precond(spec):
            intents.append(ActionIntent(action_name, goal=gid, plan=plan.id))
            plans[gid] = replace(plan, cursor=plan.cursor + 1)
    new_state = replace(state, plans=plans)
    new_state = record_history(new_state, percepts, intents, tick)
    return new_state, intents


def record_history(state: AgentInternalState, percepts, actions,
                   tick: int) -> AgentInternalState:
    """Append one history record; ticks must strictly increase."""
    if state.history and tick <= state.history[-1].tick:
        raise NonIncreasingTickError(
            f"history tick {tick} not after {state.history[-1].tick}")
    rec = HistoryRecord(tick, tuple(percepts), tuple(actions))
    return replace(state, history=state.history + (rec,))
