from geosim.gas.model import (
    AutomatonRecord,
    FieldDecl,
    GasModel,
    GasSnapshot,
    GeoRefConvention,
    NeighborhoodSpec,
)
from geosim.gas.kernel import (
    NeighborhoodView,
    apply_movement,
    apply_neighborhood,
    apply_transition,
    neighbors_by_convention,
    step,
)

__all__ = [n for n in dir() if not n.startswith("_")]
