"""The fixed agent-concept lattice profiles are scored against.

Seventeen concepts in four groups. 'plan.maintenance' is representable
but has no executable semantics anywhere in this engine; it exists so
coverage rows stay complete.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AgentConcept:
    id: str
    group: str


GROUPS = ("internal_state", "internal_dynamics", "external_state", "interface")

AGENT_CONCEPTS = (
    AgentConcept("beliefs", "internal_state"),
    AgentConcept("goals", "internal_state"),
    AgentConcept("goals.maintenance", "internal_state"),
    AgentConcept("goals.achievement", "internal_state"),
    AgentConcept("intention", "internal_state"),
    AgentConcept("preference", "internal_state"),
    AgentConcept("commitments", "internal_state"),
    AgentConcept("plan", "internal_state"),
    AgentConcept("plan.maintenance", "internal_state"),
    AgentConcept("history", "internal_state"),
    AgentConcept("dynamics.update", "internal_dynamics"),
    AgentConcept("dynamics.activation", "internal_dynamics"),
    AgentConcept("dynamics.planning", "internal_dynamics"),
    AgentConcept("roles", "external_state"),
    AgentConcept("use_case", "external_state"),
    AgentConcept("skills.abilities", "interface"),
    AgentConcept("skills.capabilities", "interface"),
)

CONCEPT_IDS = tuple(c.id for c in AGENT_CONCEPTS)
