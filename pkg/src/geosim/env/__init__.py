from geosim.env.model import (
    AgentTypeTau,
    AgentConfig,
    Entity,
    EntitySpec,
    EnvFunction,
    Environment,
    Layer,
    ObjectType,
    POINT,
    disc,
    box,
)
from geosim.env.ops import (
    agree,
    apply_global_functions,
    create_entity,
    decide,
    destroy_entity,
    perceive,
)

__all__ = [n for n in dir() if not n.startswith("_")]
