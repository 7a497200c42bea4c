from geosim.agentstate.state import (
    RUN,
    SKIP,
    ActionIntent,
    ActionSpec,
    ActivationEvent,
    AgentInternalState,
    Commitment,
    Goal,
    HistoryRecord,
    Plan,
    PlanningError,
    RoleSpec,
    SkillSet,
    activate,
    plan_and_execute,
    record_history,
    refresh_goals,
    select_intentions,
    update_beliefs,
)
from geosim.agentstate.possibilistic import (
    InfoRecord,
    PossibilisticState,
    elect_goals_possibilistic,
    revise_possibility,
)

__all__ = [n for n in dir() if not n.startswith("_")]
