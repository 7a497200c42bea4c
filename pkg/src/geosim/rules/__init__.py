from geosim.rules.ast import (
    Aggregate,
    AgreementRule,
    AdjacencyRule,
    BeliefRef,
    Binary,
    Bool,
    Choose,
    DecisionRule,
    Domain,
    IfExpr,
    LocIf,
    LocJump,
    LocRandomVacant,
    LocStay,
    LocStep,
    MovementRule,
    NbrIf,
    NbrKeep,
    NbrNone,
    NbrWithin,
    Num,
    OtherField,
    OtherLoc,
    ParamRef,
    PerceptionRule,
    Random,
    SelfField,
    SelfLoc,
    Sym,
    TransitionRule,
    Unary,
)

__all__ = [n for n in dir() if not n.startswith("_")]
