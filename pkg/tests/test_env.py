import pytest

from geosim.agentstate import ActionIntent, ActionSpec, AgentInternalState
from geosim.env import (
    AgentTypeTau,
    EntitySpec,
    EnvFunction,
    Environment,
    Layer,
    POINT,
    agree,
    apply_global_functions,
    create_entity,
    decide,
    destroy_entity,
    disc,
    perceive,
)
from geosim.errors import (
    InadmissibleShapeError,
    OutOfBoundsError,
    UnknownIdError,
    UnknownLayerError,
)
from geosim.gas import FieldDecl, GeoRefConvention
from geosim.rng import SeededRng
from geosim.rules import ast as R


def base_env(**kw):
    guard = AgentTypeTau(
        name="guard",
        state_schema=(FieldDecl("energy", "number", 5.0),),
        shapes=(POINT, disc(2)),
        actions=(ActionSpec("rest", precondition=R.Binary(
                     "<", R.SelfField("energy"), R.Num(10.0))),
                 ActionSpec("march", precondition=R.Bool(True)),
                 ActionSpec("patrol", joint=True)),
        perception_fns=kw.pop("perception_fns", ()),
        decision_fns=kw.pop("decision_fns", ()),
        agreement_fns=kw.pop("agreement_fns", ()),
    )
    return Environment(
        georef=GeoRefConvention("lattice", 10, 10, "clamp"),
        params=kw.pop("params", {}),
        functions=kw.pop("functions", ()),
        layers=(Layer("ground"), Layer("air")),
        agent_types={"guard": guard},
        object_types={},
    )


def spawn(env, layer, kind="agent", type_name="guard", location=(0, 0),
          shape=POINT, state=None, rng=None):
    spec = EntitySpec(kind, type_name, state or {"energy": 5.0}, location, shape)
    return create_entity(env, layer, spec, rng or SeededRng(0))


class TestCreate:
    def test_first_id_is_zero(self):
        env, eid = spawn(base_env(), "ground")
        assert eid == 0
        assert env.layer("ground").entities[0].location == (0, 0)

    def test_ids_are_distinct_and_monotonic(self):
        env, a = spawn(base_env(), "ground")
        env, b = spawn(env, "air")
        assert (a, b) == (0, 1)

    def test_inadmissible_shape_rejected(self):
        with pytest.raises(InadmissibleShapeError):
            spawn(base_env(), "ground", shape=("disc", 99.0))

    def test_unknown_layer_rejected(self):
        with pytest.raises(UnknownLayerError):
            spawn(base_env(), "sea")

    def test_out_of_bounds_rejected(self):
        with pytest.raises(OutOfBoundsError):
            spawn(base_env(), "ground", location=(42, 0))

    def test_random_placement_is_seeded(self):
        spec = EntitySpec("agent", "guard", {}, None, POINT)
        env1, _ = create_entity(base_env(), "ground", spec, SeededRng(9))
        env2, _ = create_entity(base_env(), "ground", spec, SeededRng(9))
        assert (env1.layer("ground").entities[0].location
                == env2.layer("ground").entities[0].location)


class TestDestroy:
    def test_sole_entity_leaves_empty_layer(self):
        env, eid = spawn(base_env(), "ground")
        out = destroy_entity(env, eid)
        assert out.layer("ground").entities == {}

    def test_observer_set_purged(self):
        from dataclasses import replace
        env, a = spawn(base_env(), "ground")
        env, b = spawn(env, "ground", location=(1, 0))
        layer = env.layer("ground")
        watcher = replace(layer.entities[a], observed=frozenset({b}))
        env = env.with_layer(replace(layer, entities={**layer.entities, a: watcher}))
        out = destroy_entity(env, b)
        assert out.layer("ground").entities[a].observed == frozenset()

    def test_unknown_id_rejected(self):
        with pytest.raises(UnknownIdError):
            destroy_entity(base_env(), 5)

    def test_destroyed_ids_never_reused(self):
        env, a = spawn(base_env(), "ground")
        env = destroy_entity(env, a)
        env, b = spawn(env, "ground")
        assert b == a + 1


def radius_rule(r, where=None):
    return R.PerceptionRule("see", "within", radius=R.Num(float(r)), where=where)


class TestPerceive:
    def test_radius_zero_sees_colocated_only(self):
        env = base_env(perception_fns=(radius_rule(0),))
        env, me = spawn(env, "ground", location=(3, 3))
        env, near = spawn(env, "ground", location=(3, 3))
        env, far = spawn(env, "ground", location=(4, 3))
        out = perceive(env, me)
        assert [p.source for p in out] == [near]

    def test_radius_two_chebyshev_distances(self):
        # three entities at Chebyshev distances 1, 2, 3: two visible
        env = base_env(perception_fns=(radius_rule(2),))
        env, me = spawn(env, "ground", location=(0, 0))
        for loc in ((1, 1), (2, 2), (3, 3)):
            env, _ = spawn(env, "ground", location=loc)
        out = perceive(env, me)
        assert len(out) == 2
        assert [p.distance for p in out] == [1.0, 2.0]

    def test_no_perception_functions_empty(self):
        env, me = spawn(base_env(), "ground")
        assert perceive(env, me) == []

    def test_param_sense(self):
        env = base_env(perception_fns=(
            R.PerceptionRule("hear", "param", param="alarm"),),
            params={"alarm": 0.7})
        env, me = spawn(env, "ground")
        out = perceive(env, me)
        assert out[0].kind == "param" and out[0].value == 0.7

    def test_locality_removing_out_of_range_entity_changes_nothing(self):
        env = base_env(perception_fns=(radius_rule(2),))
        env, me = spawn(env, "ground", location=(0, 0))
        env, near = spawn(env, "ground", location=(1, 0))
        env, far = spawn(env, "ground", location=(9, 9))
        before = perceive(env, me)
        after = perceive(destroy_entity(env, far), me)
        assert before == after

    def test_order_by_source_then_function(self):
        env = base_env(perception_fns=(radius_rule(1), radius_rule(2)))
        env, me = spawn(env, "ground", location=(0, 0))
        env, e1 = spawn(env, "ground", location=(1, 0))
        env, e2 = spawn(env, "ground", location=(0, 2))
        out = perceive(env, me)
        assert [(p.source, p.distance) for p in out] == [
            (e1, 1.0), (e1, 1.0), (e2, 2.0)]


class TestDecide:
    def decide_for(self, env, eid, **kw):
        layer, ent = env.find(eid)
        tau = env.agent_types[ent.type_name]
        return decide(AgentInternalState(), [], tau, SeededRng(0),
                      entity=ent, params=env.merged_params(layer), **kw)

    def test_no_decision_functions_no_intents(self):
        env, me = spawn(base_env(), "ground")
        _, intents = self.decide_for(env, me)
        assert intents == []

    def test_always_true_rule_yields_one_intent(self):
        env = base_env(decision_fns=(R.DecisionRule("go", R.Bool(True), "march"),))
        env, me = spawn(env, "ground")
        _, intents = self.decide_for(env, me)
        assert [i.action for i in intents] == ["march"]

    def test_unsatisfied_precondition_excluded(self):
        env = base_env(decision_fns=(R.DecisionRule("tired", R.Bool(True), "rest"),))
        env, me = spawn(env, "ground", state={"energy": 50.0})
        _, intents = self.decide_for(env, me)
        assert intents == []


class TestAgree:
    def agreement_env(self):
        return base_env(agreement_fns=(R.AgreementRule("pair_up", "patrol"),))

    def test_empty_proposals(self):
        assert agree(self.agreement_env(), []) == []

    def test_two_proposers_one_commitment(self):
        env = self.agreement_env()
        env, a = spawn(env, "ground")
        env, b = spawn(env, "ground", location=(1, 0))
        out = agree(env, [(a, ActionIntent("patrol")), (b, ActionIntent("patrol"))],
                    tick=4)
        assert len(out) == 1
        assert out[0].members == frozenset({a, b})
        assert out[0].origin_tick == 4

    def test_single_proposer_no_commitment(self):
        env = self.agreement_env()
        env, a = spawn(env, "ground")
        assert agree(env, [(a, ActionIntent("patrol"))]) == []

    def test_commitment_members_subset_of_proposers(self):
        env = self.agreement_env()
        ids = []
        for i in range(5):
            env, eid = spawn(env, "ground", location=(i, 0))
            ids.append(eid)
        proposals = [(eid, ActionIntent("patrol")) for eid in ids]
        for c in agree(env, proposals):
            assert c.members <= set(ids)

    def test_unknown_proposer_rejected(self):
        with pytest.raises(UnknownIdError):
            agree(self.agreement_env(), [(99, ActionIntent("patrol"))])


class TestGlobalFunctions:
    def test_no_functions_unchanged(self):
        env = base_env(params={"p": 4.0})
        assert apply_global_functions(env, 0).params == {"p": 4.0}

    def test_decay_halves(self):
        env = base_env(
            params={"p": 4.0},
            functions=(EnvFunction("decay", (
                ("p", R.Binary("*", R.Num(0.5), R.ParamRef("p"))),)),))
        assert apply_global_functions(env, 0).params == {"p": 2.0}

    def test_declaration_order_respected(self):
        env = base_env(
            params={"p": 0.0},
            functions=(
                EnvFunction("inc", (("p", R.Binary("+", R.ParamRef("p"), R.Num(1.0))),)),
                EnvFunction("dbl", (("p", R.Binary("*", R.Num(2.0), R.ParamRef("p"))),)),
            ))
        assert apply_global_functions(env, 0).params == {"p": 2.0}

    def test_entities_untouched(self):
        env = base_env(
            params={"p": 1.0},
            functions=(EnvFunction("inc", (
                ("p", R.Binary("+", R.ParamRef("p"), R.Num(1.0))),)),))
        env, me = spawn(env, "ground")
        out = apply_global_functions(env, 0)
        assert out.layer("ground").entities[me] == env.layer("ground").entities[me]


class TestReferentialIntegrity:
    def test_observed_sets_always_resolve(self):
        from dataclasses import replace
        env = base_env()
        ids = []
        for i in range(4):
            env, eid = spawn(env, "ground", location=(i, 0))
            ids.append(eid)
        layer = env.layer("ground")
        ent = replace(layer.entities[ids[0]],
                      observed=frozenset(ids[1:]))
        env = env.with_layer(replace(layer, entities={**layer.entities, ids[0]: ent}))
        env = destroy_entity(env, ids[2])
        for _, entity in env.entities():
            for oid in entity.observed:
                assert env.find(oid)[1] is not None
