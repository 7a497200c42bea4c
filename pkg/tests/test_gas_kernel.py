import pytest

import oracle
import zoo
from geosim.errors import GeosimError, OutOfBoundsError, StepError
from geosim.gas import (
    AutomatonRecord,
    FieldDecl,
    GasModel,
    GasSnapshot,
    GeoRefConvention,
    NeighborhoodSpec,
    NeighborhoodView,
    apply_movement,
    apply_neighborhood,
    apply_transition,
    neighbors_by_convention,
    step,
)
from geosim.rng import SeededRng
from geosim.rules import ast as R
from geosim.sim import trajectory


def line_model(n=5, rule=None, movement=None, adjacency=None, params=None):
    return GasModel(
        types=["a"],
        state_schema={"a": (FieldDecl("s", "number", 0.0),)},
        georef=GeoRefConvention("lattice", n, 1, "clamp"),
        transition={"a": rule} if rule else None,
        movement={"a": movement} if movement else None,
        adjacency={"a": adjacency} if adjacency else None,
        params=params,
    )


class TestApplyTransition:
    def test_identity_rule_returns_state(self):
        model = line_model()
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {"s": 1.0}, (0, 0))})
        view = NeighborhoodView(model, snap, 0)
        out = apply_transition(model.transition["a"], {"s": 1.0}, (0, 0), view)
        assert out == {"s": 1.0}

    def test_majority_flips_minority_state(self):
        # neighbor states {1, 1, 1, 0} around s=0: three ones win
        model = line_model(rule=zoo.majority_rule())
        automata = {0: AutomatonRecord(0, "a", {"s": 0.0}, (0, 0), (1, 2, 3, 4))}
        for i, v in zip(range(1, 5), (1, 1, 1, 0)):
            automata[i] = AutomatonRecord(i, "a", {"s": float(v)}, (min(i, 4), 0))
        snap = GasSnapshot(0, automata)
        view = NeighborhoodView(model, snap, 0)
        out = apply_transition(model.transition["a"], {"s": 0.0}, (0, 0), view)
        assert out == {"s": 1.0}

    def test_schelling_flags_unsatisfied_below_threshold(self):
        # 1 same-type of 4 neighbors = 0.25 similarity < 0.3
        model = zoo.schelling_model(5, 5, threshold=0.3)
        automata = {0: AutomatonRecord(0, "person",
                                       {"group": "red", "unsatisfied": False}, (2, 2))}
        groups = ["red", "blue", "blue", "blue"]
        spots = [(1, 1), (3, 3), (2, 1), (1, 2)]
        for i, (g, loc) in enumerate(zip(groups, spots), start=1):
            automata[i] = AutomatonRecord(i, "person",
                                          {"group": g, "unsatisfied": False}, loc)
        snap = GasSnapshot(0, automata)
        view = NeighborhoodView(model, snap, 0)
        out = apply_transition(model.transition["person"],
                               automata[0].state, (2, 2), view)
        assert out["unsatisfied"] is True

    def test_rule_error_carries_rule_and_automaton(self):
        bad = R.TransitionRule("div", (("s", R.Binary("/", zoo.num(1), zoo.num(0))),))
        model = line_model(rule=bad)
        snap = GasSnapshot(0, {7: AutomatonRecord(7, "a", {"s": 0.0}, (0, 0))})
        view = NeighborhoodView(model, snap, 7)
        with pytest.raises(GeosimError) as err:
            apply_transition(model.transition["a"], {"s": 0.0}, (0, 0), view)
        assert "div" in str(err.value) and "7" in str(err.value)

    def test_pure_no_snapshot_mutation(self):
        model = line_model(rule=zoo.majority_rule())
        automata = {i: AutomatonRecord(i, "a", {"s": float(i % 2)}, (i, 0),
                                       tuple(j for j in range(3) if j != i))
                    for i in range(3)}
        snap = GasSnapshot(0, automata)
        before = trajectory.snapshot_lines(model, snap)
        view = NeighborhoodView(model, snap, 0)
        apply_transition(model.transition["a"], {"s": 0.0}, (0, 0), view)
        assert trajectory.snapshot_lines(model, snap) == before


class TestApplyMovement:
    def test_stationary(self):
        model = line_model()
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {"s": 0.0}, (3, 0))})
        view = NeighborhoodView(model, snap, 0)
        assert apply_movement(model.movement["a"], {"s": 0.0}, (3, 0), view) == (3, 0)

    def test_torus_wraps_right_edge(self):
        mv = R.MovementRule("east", R.LocStep(zoo.num(1), zoo.num(0)))
        model = GasModel(
            types=["a"], state_schema={"a": ()},
            georef=GeoRefConvention("lattice", 5, 1, "torus"),
            movement={"a": mv})
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {}, (4, 0))})
        view = NeighborhoodView(model, snap, 0)
        assert apply_movement(model.movement["a"], {}, (4, 0), view) == (0, 0)

    def test_clamp_pins_at_edge(self):
        mv = R.MovementRule("east", R.LocStep(zoo.num(1), zoo.num(0)))
        model = line_model(movement=mv)
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {"s": 0.0}, (4, 0))})
        view = NeighborhoodView(model, snap, 0)
        assert apply_movement(model.movement["a"], {"s": 0.0}, (4, 0), view) == (4, 0)

    def test_single_vacant_neighbor_is_chosen(self):
        # 3x3 clamp lattice, all but one cell around the center occupied
        mv = R.MovementRule("jump", R.LocRandomVacant(zoo.num(1), "move"))
        model = GasModel(
            types=["a"], state_schema={"a": ()},
            georef=GeoRefConvention("lattice", 3, 3, "clamp"),
            movement={"a": mv})
        automata = {}
        aid = 0
        for y in range(3):
            for x in range(3):
                if (x, y) == (0, 0):
                    continue  # the lone vacancy
                automata[aid] = AutomatonRecord(aid, "a", {}, (x, y))
                aid += 1
        snap = GasSnapshot(0, automata)
        center = next(a for a in automata.values() if a.location == (1, 1))
        view = NeighborhoodView(model, snap, center.id)
        for seed in range(5):
            view = NeighborhoodView(model, snap, center.id, rng=SeededRng(seed))
            assert apply_movement(model.movement["a"], {}, (1, 1), view) == (0, 0)


class TestApplyNeighborhood:
    def test_static_rule_keeps_neighbors(self):
        model = line_model()
        automata = {i: AutomatonRecord(i, "a", {"s": 0.0}, (i, 0)) for i in range(3)}
        automata[0] = AutomatonRecord(0, "a", {"s": 0.0}, (0, 0), (1, 2))
        snap = GasSnapshot(0, automata)
        view = NeighborhoodView(model, snap, 0)
        out = apply_neighborhood(model.adjacency["a"], {"s": 0.0}, (0, 0), view)
        assert out == frozenset({1, 2})

    def test_geometric_recompute_moore_1(self):
        rule = R.AdjacencyRule("refresh", R.NbrWithin(zoo.num(1)))
        model, snap = zoo.full_lattice_model(5, 5, "torus")
        model = GasModel(
            types=["cell"], state_schema=model.state_schema,
            georef=model.georef, adjacency={"cell": rule},
            neighborhood_spec=model.neighborhood_spec)
        center = 12  # (2, 2) row-major on 5x5
        view = NeighborhoodView(model, snap, center)
        out = apply_neighborhood(model.adjacency["cell"], {"s": 0.0}, (2, 2), view)
        expected = {6, 7, 8, 11, 13, 16, 17, 18}
        assert out == frozenset(expected)
        assert center not in out

    def test_empty_surroundings_give_empty_set(self):
        rule = R.AdjacencyRule("refresh", R.NbrWithin(zoo.num(1)))
        model = GasModel(
            types=["a"], state_schema={"a": ()},
            georef=GeoRefConvention("lattice", 9, 9, "clamp"),
            adjacency={"a": rule})
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {}, (4, 4))})
        view = NeighborhoodView(model, snap, 0)
        assert apply_neighborhood(model.adjacency["a"], {}, (4, 4), view) == frozenset()


class TestNeighborsByConvention:
    def setup_method(self):
        _, self.snap = zoo.full_lattice_model(5, 5, "clamp")
        self.spec = NeighborhoodSpec("moore", 1)

    def test_interior_full_lattice_moore_1(self):
        georef = GeoRefConvention("lattice", 5, 5, "clamp")
        out = neighbors_by_convention(georef, self.spec, (2, 2), self.snap, exclude=12)
        assert len(out) == 8

    def test_corner_clamp_has_3(self):
        georef = GeoRefConvention("lattice", 5, 5, "clamp")
        out = neighbors_by_convention(georef, self.spec, (0, 0), self.snap, exclude=0)
        assert out == frozenset({1, 5, 6})

    def test_corner_torus_has_8(self):
        georef = GeoRefConvention("lattice", 5, 5, "torus")
        out = neighbors_by_convention(georef, self.spec, (0, 0), self.snap, exclude=0)
        assert len(out) == 8
        assert out == frozenset({1, 4, 5, 6, 9, 20, 21, 24})

    def test_von_neumann_uses_manhattan(self):
        georef = GeoRefConvention("lattice", 5, 5, "clamp")
        out = neighbors_by_convention(georef, NeighborhoodSpec("vonneumann", 1),
                                      (2, 2), self.snap, exclude=12)
        assert out == frozenset({7, 11, 13, 17})

    def test_out_of_bounds_query_rejected(self):
        georef = GeoRefConvention("lattice", 5, 5, "clamp")
        with pytest.raises(OutOfBoundsError):
            neighbors_by_convention(georef, self.spec, (9, 0), self.snap)


class TestStep:
    def test_empty_snapshot_ticks_forward(self):
        model = line_model()
        out = step(model, GasSnapshot(3, {}), SeededRng(0))
        assert out.tick == 4 and out.automata == {}

    def test_identity_rules_preserve_automata(self):
        model, snap = zoo.full_lattice_model(4, 4, "torus")
        out = step(model, snap, SeededRng(0))
        assert out.tick == 1
        assert trajectory.snapshot_lines(model, out)[0].count('"tick":1')
        for aid, rec in out.automata.items():
            assert rec.state == snap.automata[aid].state
            assert rec.location == snap.automata[aid].location

    def test_blinker_rotates(self):
        model, snap = zoo.full_lattice_model(
            5, 5, "torus", rule=zoo.life_rule(), field="alive",
            states={7: 1, 12: 1, 17: 1})  # vertical triple through (2,2)
        out = step(model, snap, SeededRng(0))
        alive = {aid for aid, rec in out.automata.items() if rec.state["alive"] == 1}
        assert alive == {11, 12, 13}  # horizontal triple

    def test_step_error_aggregates_and_preserves_input(self):
        bad = R.TransitionRule("boom", (("s", R.Binary("/", zoo.num(1), R.SelfField("s"))),))
        model = line_model(rule=bad)
        automata = {i: AutomatonRecord(i, "a", {"s": 0.0}, (i, 0)) for i in range(3)}
        snap = GasSnapshot(0, automata)
        before = trajectory.snapshot_lines(model, snap)
        with pytest.raises(StepError) as err:
            step(model, snap, SeededRng(0))
        assert len(err.value.failures) == 3
        assert trajectory.snapshot_lines(model, snap) == before

    def test_synchrony_under_storage_permutation(self):
        model, snap = zoo.full_lattice_model(
            4, 4, "torus", rule=zoo.majority_rule(),
            states={i: i % 2 for i in range(16)})
        out1 = step(model, snap, SeededRng(11))
        for perm_seed in (1, 2, 3):
            ids = list(snap.automata)
            SeededRng(perm_seed).stream("perm").shuffle(ids)
            shuffled = GasSnapshot(0, {i: snap.automata[i] for i in ids})
            out2 = step(model, shuffled, SeededRng(11))
            assert (trajectory.snapshot_lines(model, out2)
                    == trajectory.snapshot_lines(model, out1))

    def test_deterministic_across_reruns(self):
        model = zoo.schelling_model(8, 8, threshold=0.7)
        snap = zoo.place_schelling(model, SeededRng(5), occupancy=0.8)

        def run(seed):
            cur = snap
            for _ in range(3):
                cur = step(model, cur, SeededRng(seed))
            return trajectory.snapshot_lines(model, cur)

        assert run(42) == run(42)
        assert run(43) != run(42)

    def test_no_neighborhood_contains_owner(self):
        rule = R.AdjacencyRule("refresh", R.NbrWithin(zoo.num(2)))
        model, snap = zoo.full_lattice_model(4, 4, "torus")
        model = GasModel(
            types=["cell"], state_schema=model.state_schema,
            georef=model.georef, adjacency={"cell": rule},
            neighborhood_spec=model.neighborhood_spec)
        out = step(model, snap, SeededRng(0))
        for rec in out.automata.values():
            assert rec.id not in rec.neighborhood


class TestOracleEquivalence:
    def test_majority_against_brute_force_small_lattices(self):
        rng = SeededRng(99)
        stream = rng.stream("cases")
        for w, h in ((3, 3), (4, 4), (4, 3), (2, 4)):
            for _ in range(40):
                states = {i: stream.below(2) for i in range(w * h)}
                model, snap = zoo.full_lattice_model(
                    w, h, "torus", rule=zoo.majority_rule(), states=states)
                got = step(model, snap, SeededRng(1))
                nbrs = {aid: rec.neighborhood for aid, rec in snap.automata.items()}
                want = oracle.majority_step(states, nbrs)
                assert {aid: rec.state["s"] for aid, rec in got.automata.items()} == {
                    aid: float(v) for aid, v in want.items()}

    def test_life_against_brute_force(self):
        rng = SeededRng(7)
        stream = rng.stream("life")
        for _ in range(25):
            states = {i: stream.below(2) for i in range(16)}
            model, snap = zoo.full_lattice_model(
                4, 4, "torus", rule=zoo.life_rule(), field="alive", states=states)
            got = step(model, snap, SeededRng(1))
            positions = {aid: rec.location for aid, rec in snap.automata.items()}
            want = oracle.life_step(states, positions, 4, 4)
            assert {aid: rec.state["alive"] for aid, rec in got.automata.items()} == {
                aid: float(v) for aid, v in want.items()}


class TestModelInvariants:
    def test_rule_map_over_unknown_type_rejected(self):
        with pytest.raises(GeosimError):
            GasModel(types=["a"], state_schema={"a": ()},
                     georef=GeoRefConvention("lattice", 2, 2, "clamp"),
                     transition={"b": zoo.majority_rule()})

    def test_degenerate_lattice_rejected(self):
        with pytest.raises(GeosimError):
            GeoRefConvention("lattice", 0, 3, "clamp")

    def test_self_neighbor_rejected(self):
        with pytest.raises(GeosimError):
            AutomatonRecord(1, "a", {}, (0, 0), (1,))

    def test_out_of_bounds_record_rejected(self):
        model = line_model()
        snap = GasSnapshot(0, {0: AutomatonRecord(0, "a", {"s": 0.0}, (9, 0))})
        with pytest.raises(OutOfBoundsError):
            step(model, snap, SeededRng(0))
