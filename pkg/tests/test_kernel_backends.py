"""Pure and compiled kernels must agree bit for bit.

Randomized models sweep the whole instruction set: aggregates over both
domains, stream draws, movement forms, boundary modes, metrics. Each case
steps under both backends and compares canonical serializations.
"""

import pytest

import zoo
from geosim import kernels
from geosim.gas import (
    AutomatonRecord,
    FieldDecl,
    GasModel,
    GasSnapshot,
    GeoRefConvention,
    NeighborhoodSpec,
)
from geosim.gas import lowering
from geosim.rng import SeededRng
from geosim.rules import ast as R
from geosim.sim import trajectory

pytestmark = pytest.mark.skipif(not kernels.HAVE_COMPILED,
                                reason="fast kernel extension not built")


def random_expr(stream, depth=0, in_agg=False):
    """A well-typed number-valued expression the validator would accept:
    'other' only under an aggregate, no draws inside aggregates."""
    top = depth < 3 and not in_agg
    pick = stream.below(10 if top else 5)
    if pick == 0:
        return R.Num(stream.below(7) - 3)
    if pick == 1:
        return R.SelfField("a")
    if pick == 2:
        return R.SelfField("b")
    if pick == 3:
        return R.OtherField(("a", "b")[stream.below(2)]) if in_agg \
            else R.SelfField("b")
    if pick == 4:
        return R.Binary(("+", "-", "*")[stream.below(3)],
                        random_expr(stream, depth + 1, in_agg),
                        random_expr(stream, depth + 1, in_agg))
    if pick == 5:
        return R.Random(f"s{stream.below(2)}")
    if pick == 6:
        return R.IfExpr(random_pred(stream, depth + 1, in_agg),
                        random_expr(stream, depth + 1, in_agg),
                        random_expr(stream, depth + 1, in_agg))
    if pick == 7:
        return R.Aggregate("count", random_domain(stream),
                           where=random_pred(stream, 3, in_agg=True))
    if pick == 8:
        return R.Aggregate(("min", "max")[stream.below(2)],
                           random_domain(stream),
                           value=random_expr(stream, 3, in_agg=True),
                           default=R.Num(stream.below(5)))
    if stream.below(2):
        return R.Choose(f"c{stream.below(2)}",
                        tuple(R.Num(k) for k in range(2 + stream.below(3))))
    return R.Aggregate("fraction", random_domain(stream),
                       where=random_pred(stream, 3, in_agg=True))


def random_domain(stream):
    if stream.below(2):
        return R.Domain("neighbors")
    return R.Domain("within", R.Num(1 + stream.below(2)))


def random_pred(stream, depth, in_agg=False):
    pick = stream.below(4)
    if pick == 0:
        subject = (R.OtherField("a") if in_agg and stream.below(2)
                   else R.SelfField("a"))
        return R.Binary("==", subject, R.Num(stream.below(4)))
    if pick == 1:
        return R.Binary("<", random_expr(stream, 3, in_agg),
                        random_expr(stream, 3, in_agg))
    if pick == 2:
        return R.Bool(bool(stream.below(2)))
    return R.Binary(("and", "or")[stream.below(2)],
                    random_pred(stream, 3, in_agg),
                    random_pred(stream, 3, in_agg))


def random_movement(stream):
    pick = stream.below(5)
    if pick == 0:
        return R.LocStay()
    if pick == 1:
        return R.LocStep(R.Num(stream.below(3) - 1), R.Num(stream.below(3) - 1))
    if pick == 2:
        return R.LocJump(R.Num(stream.below(6)), R.Num(stream.below(6)))
    if pick == 3:
        return R.LocRandomVacant(R.Num(1 + stream.below(2)), "mv")
    return R.LocIf(random_pred(stream, 2), random_movement(stream),
                   R.LocStay())


def random_adjacency(stream):
    pick = stream.below(4)
    if pick == 0:
        return R.NbrKeep()
    if pick == 1:
        return R.NbrNone()
    if pick == 2:
        return R.NbrWithin(R.Num(1 + stream.below(2)))
    return R.NbrIf(random_pred(stream, 2), random_adjacency(stream),
                   random_adjacency(stream))


def random_case(stream, continuous=False):
    if continuous:
        georef = GeoRefConvention("continuous", 1, 1,
                                  ("clamp", "torus")[stream.below(2)],
                                  box=(0.0, 0.0, 8.0, 8.0))
    else:
        georef = GeoRefConvention("lattice", 3 + stream.below(6),
                                  3 + stream.below(6),
                                  ("clamp", "torus")[stream.below(2)])
    metric = ("moore", "vonneumann", "euclidean")[stream.below(3)]
    movement = R.MovementRule("mv", R.LocStay() if continuous
                              else random_movement(stream))
    model = GasModel(
        types=["u"],
        state_schema={"u": (FieldDecl("a", "number", 0.0),
                            FieldDecl("b", "number", 0.0))},
        georef=georef,
        transition={"u": R.TransitionRule(
            "tr", (("a", random_expr(stream)), ("b", random_expr(stream))))},
        movement={"u": movement},
        adjacency={"u": R.AdjacencyRule("ad", random_adjacency(stream))},
        neighborhood_spec={"u": NeighborhoodSpec(metric, 1 + stream.below(2))},
        params={},
    )
    n = 2 + stream.below(10)
    automata = {}
    for aid in range(n):
        if continuous:
            loc = (stream.uniform() * 8.0, stream.uniform() * 8.0)
        else:
            loc = (stream.below(georef.width), stream.below(georef.height))
        automata[aid] = AutomatonRecord(
            aid, "u", {"a": float(stream.below(4)), "b": float(stream.below(4))},
            loc)
    snap = GasSnapshot(0, automata)
    automata = {
        rec.id: AutomatonRecord(
            rec.id, rec.type, rec.state, rec.location,
            tuple(aid for aid in automata
                  if aid != rec.id and stream.below(4) == 0))
        for rec in automata.values()
    }
    return model, GasSnapshot(0, automata)


def run_backend(backend, model, snap, seed):
    world = lowering.lower(model, snap)
    programs = [(model.transition[t], model.movement[t], model.adjacency[t])
                for t in model.types]
    errors, state, loc, nbr = backend.run_step(world, programs, snap.tick, seed)
    if errors:
        return ("errors", [(i, name, st) for i, name, st in errors])
    lifted = lowering.lift(model, world, snap.tick + 1, state, loc, nbr)
    return ("ok", trajectory.snapshot_lines(model, lifted))


class TestBackendEquivalence:
    def test_lattice_cases_bitwise_equal(self):
        backends = kernels.backends()
        stream = SeededRng(2024).stream("cases")
        for case in range(250):
            model, snap = random_case(stream)
            out = {name: run_backend(b, model, snap, seed=case)
                   for name, b in backends.items()}
            assert out["pure"] == out["compiled"], f"case {case} diverged"

    def test_continuous_cases_bitwise_equal(self):
        backends = kernels.backends()
        stream = SeededRng(77).stream("cont")
        for case in range(60):
            model, snap = random_case(stream, continuous=True)
            out = {name: run_backend(b, model, snap, seed=case)
                   for name, b in backends.items()}
            assert out["pure"] == out["compiled"], f"case {case} diverged"

    def test_single_rule_eval_parity(self):
        backends = kernels.backends()
        stream = SeededRng(5).stream("single")
        for case in range(100):
            model, snap = random_case(stream)
            world_p = lowering.lower(model, snap)
            world_c = lowering.lower(model, snap)
            i = stream.below(world_p.n)
            for kind in ("transition", "movement", "adjacency"):
                rule = getattr(model, kind if kind != "adjacency" else "adjacency")["u"]
                got = {}
                for name, b in backends.items():
                    world = world_p if name == "pure" else world_c
                    status, payload = b.eval_rule(world, rule, i, 3, case)
                    if kind == "adjacency":
                        payload = [int(v) for v in payload]
                    elif kind == "transition":
                        payload = [float(v) for v in payload]
                    else:
                        payload = (float(payload[0]), float(payload[1]))
                    got[name] = (status, payload)
                assert got["pure"] == got["compiled"], f"case {case} {kind}"

    def test_error_paths_agree(self):
        backends = kernels.backends()
        bad = R.TransitionRule(
            "boom", (("a", R.Binary("/", R.Num(1), R.SelfField("a"))),))
        model = GasModel(
            types=["u"],
            state_schema={"u": (FieldDecl("a", "number", 0.0),)},
            georef=GeoRefConvention("lattice", 4, 1, "clamp"),
            transition={"u": bad})
        automata = {i: AutomatonRecord(i, "u", {"a": float(i % 2)}, (i, 0))
                    for i in range(4)}
        snap = GasSnapshot(0, automata)
        out = {name: run_backend(b, model, snap, 0)
               for name, b in kernels.backends().items()}
        assert out["pure"] == out["compiled"]
        assert out["pure"][0] == "errors"

    def test_schelling_trajectory_digest_parity(self):
        model = zoo.schelling_model(12, 12)
        snap = zoo.place_schelling(model, SeededRng(3), occupancy=0.8)
        digests = {}
        for name, backend in kernels.backends().items():
            cur = snap
            lines = []
            for t in range(15):
                out = run_backend(backend, model, cur, seed=99)
                assert out[0] == "ok"
                # re-lift to keep stepping
                world = lowering.lower(model, cur)
                programs = [(model.transition[t2], model.movement[t2],
                             model.adjacency[t2]) for t2 in model.types]
                errors, state, loc, nbr = backend.run_step(
                    world, programs, cur.tick, 99)
                cur = lowering.lift(model, world, cur.tick + 1, state, loc, nbr)
                lines.extend(out[1])
            digests[name] = trajectory.digest(lines)
        assert digests["pure"] == digests["compiled"]
