"""The four-stage agent mind: perceive, remember, plan, act.

Perception renders structured percepts into text through templates, so
whatever backend does the planning sees the same deterministic account of
the world that the memory keeps.
"""

from __future__ import annotations

from geosim.agentstate.state import ActionIntent, Plan, SkillSet
from geosim.errors import BackendError, MissingTemplateError, PlanValidationError
from geosim.minds.memory import ObservationRecord

DEFAULT_TEMPLATES = {
    "empty": "nothing observed",
    "entity": "{key} {source} at distance {distance:g}",
    "param": "{key} is {value}",
}


def perceive_text(percepts, templates=None, tick: int = 0,
                  agent: int = 0) -> ObservationRecord:
    """Render percepts to one deterministic observation record."""
    templates = templates if templates is not None else DEFAULT_TEMPLATES
    if not percepts:
        if "empty" not in templates:
            raise MissingTemplateError("no template for empty percepts")
        return ObservationRecord(tick, agent, templates["empty"], ())
    parts = []
    for p in percepts:
        if p.kind not in templates:
            raise MissingTemplateError(f"no template for percept kind {p.kind!r}")
        parts.append(templates[p.kind].format(
            key=p.key, value=p.value, source=p.source,
            distance=p.distance if p.distance is not None else 0.0))
    return ObservationRecord(tick, agent, "; ".join(parts), tuple(percepts))


def plan(backend, goal, memories, capabilities: SkillSet, *,
         agent: int = 0, tick: int = 0) -> Plan:
    """Ask the backend for a plan toward the goal; validate every step.

    A plan that names an action outside the agent's capabilities is
    rejected outright rather than trimmed.
    """
    steps = backend.plan_steps(goal, memories, capabilities,
                               agent=agent, tick=tick)
    steps = tuple(steps)
    for s in steps:
        if capabilities.capability(s) is None:
            raise PlanValidationError(
                f"backend planned unknown action {s!r} for goal {goal.id!r}")
    return Plan(goal.id, steps, 0)


def act(plan_obj: Plan, state, capabilities: SkillSet, precond=None):
    """Emit the plan's cursor step when its precondition holds.

    At most one intent per plan per tick; the caller owns cursor
    advancement. A false precondition emits nothing.
    """
    if not plan_obj.pending:
        return []
    action_name = plan_obj.steps[plan_obj.cursor]
    spec = capabilities.capability(action_name)
    if spec is None:
        raise BackendError(f"plan step {action_name!r} outside capabilities")
    if precond is not None and not precond(spec):
        return []
    return [ActionIntent(action_name, goal=plan_obj.id, plan=plan_obj.id)]
