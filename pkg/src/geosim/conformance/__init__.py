from geosim.conformance.concepts import AGENT_CONCEPTS, AgentConcept, GROUPS
from geosim.conformance.matrix import (
    CoverageMatrix,
    MethodologyProfile,
    check_coverage,
    load_profiles,
    matrix,
    parse_profiles,
    profile_from_scenario,
    shipped_profiles,
)

__all__ = [n for n in dir() if not n.startswith("_")]
