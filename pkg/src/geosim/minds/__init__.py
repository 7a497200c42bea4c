from geosim.minds.memory import (
    MemoryStore,
    ObservationRecord,
    PlanRecord,
    QuerySpec,
    memory_retrieve,
)
from geosim.minds.pipeline import (
    DEFAULT_TEMPLATES,
    act,
    perceive_text,
    plan,
)
from geosim.minds.backends import (
    ExternalMind,
    HttpTransport,
    PipeTransport,
    ReplayLog,
    RuleBasedMind,
    ScriptedMind,
    load_transcript,
)

__all__ = [n for n in dir() if not n.startswith("_")]
