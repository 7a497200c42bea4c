import pytest

import oracle
from geosim.agentstate import (
    InfoRecord,
    PossibilisticState,
    elect_goals_possibilistic,
    revise_possibility,
)
from geosim.agentstate.possibilistic import DesireRule
from geosim.errors import ContradictionError, GeosimError
from geosim.rng import SeededRng


def ps(pi, rules):
    return PossibilisticState(pi=pi, desire_rules=tuple(rules))


class TestElection:
    def test_uniform_distribution_single_rule(self):
        state = ps({"w1": 1.0, "w2": 1.0},
                   [DesireRule(True, "d1", frozenset({"w1", "w2"}))])
        j, g_star, pi_val = elect_goals_possibilistic(state, {"d1"})
        assert j == {"d1"} and g_star == {"d1"} and pi_val == 1.0

    def test_mutually_exclusive_desires_higher_possibility_wins(self):
        # four worlds; d1 only in w2 (pi .8), d2 only in w3 (pi .5)
        state = ps({"w1": 1.0, "w2": 0.8, "w3": 0.5, "w4": 0.2},
                   [DesireRule(True, "d1", frozenset({"w2"})),
                    DesireRule(True, "d2", frozenset({"w3"}))])
        j, g_star, pi_val = elect_goals_possibilistic(state, {"d1", "d2"})
        assert j == {"d1", "d2"}
        assert g_star == {"d1"}
        assert pi_val == 0.8

    def test_no_rule_fires_elects_empty_set(self):
        state = ps({"w1": 1.0}, [DesireRule(False, "d1", frozenset({"w1"}))])
        j, g_star, pi_val = elect_goals_possibilistic(state, {"d1"})
        assert j == frozenset() and g_star == frozenset() and pi_val == 1.0

    def test_joint_satisfaction_beats_singletons(self):
        state = ps({"w1": 1.0, "w2": 1.0},
                   [DesireRule(True, "a", frozenset({"w1", "w2"})),
                    DesireRule(True, "b", frozenset({"w1"}))])
        _, g_star, pi_val = elect_goals_possibilistic(state, {"a", "b"})
        assert g_star == {"a", "b"} and pi_val == 1.0

    def test_candidates_filter_desires(self):
        state = ps({"w1": 1.0},
                   [DesireRule(True, "a", frozenset({"w1"})),
                    DesireRule(True, "b", frozenset({"w1"}))])
        j, g_star, _ = elect_goals_possibilistic(state, {"a"})
        assert j == {"a"} and g_star == {"a"}

    def test_unnormalized_distribution_rejected(self):
        state = ps({"w1": 0.4}, [])
        with pytest.raises(GeosimError):
            elect_goals_possibilistic(state, set())

    def test_guard_eval_hook(self):
        state = ps({"w1": 1.0},
                   [DesireRule("hungry", "eat", frozenset({"w1"}))])
        j, g_star, _ = elect_goals_possibilistic(
            state, {"eat"}, guard_eval=lambda guard: guard == "hungry")
        assert g_star == {"eat"}


class TestRevision:
    def test_full_world_set_keeps_distribution(self):
        state = ps({"w1": 1.0, "w2": 0.6}, [])
        out = revise_possibility(state, InfoRecord("i", frozenset({"w1", "w2"})))
        assert out.pi == {"w1": 1.0, "w2": 0.6} and out.last_info == "i"

    def test_excluding_top_world_renormalizes(self):
        state = ps({"w1": 1.0, "w2": 0.6}, [])
        out = revise_possibility(state, InfoRecord("i", frozenset({"w2"})))
        assert out.pi == {"w1": 0.0, "w2": 1.0}

    def test_contradiction_leaves_state_unchanged(self):
        state = ps({"w1": 1.0}, [])
        with pytest.raises(ContradictionError):
            revise_possibility(state, InfoRecord("i", frozenset()))
        assert state.pi == {"w1": 1.0} and state.last_info is None


class TestOracleEquivalence:
    def random_instance(self, stream):
        n_worlds = 1 + stream.below(5)
        worlds = [f"w{i}" for i in range(n_worlds)]
        pi = {w: round(stream.uniform(), 3) for w in worlds}
        pi[worlds[stream.below(n_worlds)]] = 1.0
        n_desires = stream.below(9)
        rules = []
        for d in range(n_desires):
            holds = frozenset(w for w in worlds if stream.below(2))
            rules.append(DesireRule(stream.below(4) != 0, f"d{d}", holds))
        return ps(pi, rules)

    def test_matches_exhaustive_enumeration(self):
        stream = SeededRng(777).stream("elect")
        for _ in range(300):
            state = self.random_instance(stream)
            candidates = {r.goal for r in state.desire_rules}
            j, g_star, pi_val = elect_goals_possibilistic(state, candidates)
            desire_worlds = {r.goal: r.worlds for r in state.desire_rules}
            want_set, want_pi = oracle.elect_goals(state.pi, desire_worlds,
                                                   sorted(j))
            assert g_star == want_set
            assert pi_val == want_pi
