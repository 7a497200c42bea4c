"""Rule expression trees.

Rules are small typed expressions over three value types (number, boolean,
symbol) plus two special rule bodies: movement rules evaluate to a location
and adjacency rules to a set of neighbor ids. The scenario language parses
into these nodes; the engine either walks them directly (agent-side rules)
or compiles them to a flat instruction tape for the step kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Sym:
    """A symbol literal, written as a quoted string in scenario text."""

    name: str


@dataclass(frozen=True)
class ParamRef:
    """Reference to an environment or layer parameter by bare name."""

    name: str


@dataclass(frozen=True)
class SelfField:
    name: str


@dataclass(frozen=True)
class OtherField:
    """Field of the element under an aggregate: a neighbor automaton's
    state field, or a percept attribute (kind, distance, value, x, y)."""

    name: str


@dataclass(frozen=True)
class SelfLoc:
    axis: int  # 0 = x, 1 = y


@dataclass(frozen=True)
class OtherLoc:
    axis: int


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' | 'not'
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / % < <= > >= == != and or
    left: object
    right: object


@dataclass(frozen=True)
class IfExpr:
    cond: object
    then: object
    orelse: object


@dataclass(frozen=True)
class Domain:
    """What an aggregate ranges over.

    kind 'neighbors' is the stored neighbor set, 'within' is a geometric
    query (radius expression, metric taken from the automaton type's
    neighborhood declaration), 'percepts' is the current percept list and
    is only legal in agent-side rules.
    """

    kind: str
    radius: object | None = None


@dataclass(frozen=True)
class Aggregate:
    kind: str  # 'count' | 'fraction' | 'min' | 'max'
    domain: Domain
    where: object | None = None   # predicate (count, fraction)
    value: object | None = None   # value expression (min, max)
    default: object | None = None  # result on empty domain (min, max)


@dataclass(frozen=True)
class Random:
    """Uniform draw in [0,1) from the named per-individual stream."""

    stream: str


@dataclass(frozen=True)
class Choose:
    """Uniform choice among option expressions, drawn from a named stream."""

    stream: str
    options: tuple = ()


@dataclass(frozen=True)
class BeliefRef:
    """Belief lookup with a default; the default fixes the result type."""

    name: str
    default: object = None


# -- movement rule bodies ---------------------------------------------------

@dataclass(frozen=True)
class LocStay:
    pass


@dataclass(frozen=True)
class LocJump:
    x: object
    y: object


@dataclass(frozen=True)
class LocStep:
    dx: object
    dy: object


@dataclass(frozen=True)
class LocRandomVacant:
    """Jump to a uniformly chosen vacant lattice cell.

    With a radius the candidates are vacant cells within that distance of
    the current location (type metric); without one, the whole lattice.
    No vacant candidate means stay put.
    """

    radius: object | None
    stream: str


@dataclass(frozen=True)
class LocIf:
    cond: object
    then: object
    orelse: object


# -- adjacency rule bodies --------------------------------------------------

@dataclass(frozen=True)
class NbrKeep:
    pass


@dataclass(frozen=True)
class NbrNone:
    pass


@dataclass(frozen=True)
class NbrWithin:
    radius: object


@dataclass(frozen=True)
class NbrIf:
    cond: object
    then: object
    orelse: object


# -- named rules ------------------------------------------------------------

@dataclass(frozen=True)
class TransitionRule:
    name: str
    assigns: tuple = ()  # ((field, expr), ...); reads see the pre-step state

    kind = "transition"


@dataclass(frozen=True)
class MovementRule:
    name: str
    body: object = field(default_factory=LocStay)

    kind = "movement"


@dataclass(frozen=True)
class AdjacencyRule:
    name: str
    body: object = field(default_factory=NbrKeep)

    kind = "adjacency"


@dataclass(frozen=True)
class PerceptionRule:
    """One sense: entities within a radius (optionally filtered), or the
    current value of a parameter."""

    name: str
    sense: str  # 'within' | 'param'
    radius: object | None = None
    where: object | None = None
    param: str | None = None

    kind = "perception"


@dataclass(frozen=True)
class DecisionRule:
    name: str
    when: object = None
    action: str = ""

    kind = "decision"


@dataclass(frozen=True)
class AgreementRule:
    """Pairwise agreement: proposers of the named joint action are bound
    two at a time, lowest ids first."""

    name: str
    action: str = ""

    kind = "agreement"


IDENTITY_TRANSITION = TransitionRule("identity", ())
IDENTITY_MOVEMENT = MovementRule("identity", LocStay())
IDENTITY_ADJACENCY = AdjacencyRule("identity", NbrKeep())
