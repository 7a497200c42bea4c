"""Goal election over a possibility distribution.

Beliefs are a normalized possibility distribution over a finite world
set. Desires fire from guard rules; among the fired ("justified") ones
the agent adopts the set with the highest possibility of being jointly
satisfiable, preferring larger sets and then smaller goal ids on ties.
The empty set, with possibility 1, is elected only when nothing else is
satisfiable in a world of positive possibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from geosim.errors import ContradictionError, GeosimError


@dataclass(frozen=True)
class DesireRule:
    guard: object          # bool, nullary callable, or a rule expression
    goal: str
    worlds: frozenset      # worlds in which the desire holds


@dataclass(frozen=True)
class InfoRecord:
    id: str
    worlds: frozenset      # worlds compatible with the information


@dataclass(frozen=True)
class PossibilisticState:
    pi: dict = field(default_factory=dict)   # world -> possibility in [0,1]
    desire_rules: tuple = ()
    last_info: str | None = None

    def check_normalized(self):
        if not self.pi or max(self.pi.values()) != 1.0:
            raise GeosimError("possibility distribution is not normalized "
                              "(max must be exactly 1)")


def _fires(guard, guard_eval) -> bool:
    if guard_eval is not None:
        return bool(guard_eval(guard))
    if callable(guard):
        return bool(guard())
    return bool(guard)


def elect_goals_possibilistic(ps: PossibilisticState, candidates,
                              guard_eval=None):
    """Return (justified desires J, elected set G*, possibility of G*).

    A candidate set is a nonempty subset of J jointly satisfied in some
    world of positive possibility; ranking is by possibility, then
    cardinality, then lexicographically smallest goal-id tuple. With no
    candidate, G* is empty with possibility 1 (vacuously satisfied).

    Only world-induced subsets need inspection: any satisfiable subset S
    has a witness world w, and the full set of justified desires holding
    at w contains S with the same possibility and no smaller cardinality.
    """
    ps.check_normalized()
    justified = []
    for rule in ps.desire_rules:
        if rule.goal in candidates and _fires(rule.guard, guard_eval):
            justified.append(rule)
    j_ids = frozenset(r.goal for r in justified)

    best = None  # (pi, size, ids tuple ascending)
    seen = set()
    for w, p in ps.pi.items():
        if p <= 0.0:
            continue
        s_w = frozenset(r.goal for r in justified if w in r.worlds)
        if not s_w or s_w in seen:
            continue
        seen.add(s_w)
        pi_val = max(p2 for w2, p2 in ps.pi.items()
                     if all(w2 in r.worlds for r in justified if r.goal in s_w))
        ids = tuple(sorted(s_w))
        cand = (pi_val, len(s_w), ids)
        if best is None:
            best = cand
        elif (cand[0], cand[1]) > (best[0], best[1]):
            best = cand
        elif (cand[0], cand[1]) == (best[0], best[1]) and cand[2] < best[2]:
            best = cand
    if best is None:
        return j_ids, frozenset(), 1.0
    return j_ids, frozenset(best[2]), best[0]


def revise_possibility(ps: PossibilisticState, info: InfoRecord) -> PossibilisticState:
    """Condition the distribution on new information.

    Worlds incompatible with the information drop to possibility zero and
    the rest are renormalized so the maximum is 1. Information compatible
    with no world is a contradiction; the state is left unchanged and the
    error raised.
    """
    ps.check_normalized()
    revised = {w: (p if w in info.worlds else 0.0) for w, p in ps.pi.items()}
    mx = max(revised.values())
    if mx == 0.0:
        raise ContradictionError(
            f"information {info.id!r} excludes every world")
    revised = {w: p / mx for w, p in revised.items()}
    return replace(ps, pi=revised, last_info=info.id)
