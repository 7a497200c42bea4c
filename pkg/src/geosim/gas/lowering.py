"""Bridge between record-level snapshots and the array form the kernels run on.

Automata are laid out in ascending id order; every per-automaton quantity
the kernels touch (state fields, locations, neighbor lists, the lattice
occupancy index) becomes a flat array. Symbols and booleans are interned
to doubles on the way down and restored on the way up.
"""

from __future__ import annotations

import numpy as np

from geosim.errors import GeosimError
from geosim.gas.model import AutomatonRecord, GasModel, GasSnapshot
from geosim.kernels import ops as K


class LoweredWorld:
    __slots__ = (
        "kind", "width", "height", "boundary", "x0", "y0", "x1", "y1",
        "n", "ids", "type_code", "type_names", "metric", "state", "loc",
        "nbr_indptr", "nbr_data", "cell_indptr", "cell_data", "params",
        "index_of",
    )


def lower(model: GasModel, snapshot: GasSnapshot, params=None) -> LoweredWorld:
    w = LoweredWorld()
    g = model.georef
    w.kind = K.KIND_LATTICE if g.kind == "lattice" else K.KIND_CONTINUOUS
    w.boundary = K.BOUNDARY_TORUS if g.torus else K.BOUNDARY_CLAMP
    w.width, w.height = int(g.width), int(g.height)
    w.x0, w.y0, w.x1, w.y1 = (float(v) for v in g.box)

    w.type_names = list(model.types)
    tcode = {t: i for i, t in enumerate(w.type_names)}
    w.metric = np.array([model.neighborhood_spec[t].metric_code for t in w.type_names],
                        dtype=np.int32)

    recs = snapshot.ordered()
    n = w.n = len(recs)
    w.ids = np.array([r.id for r in recs], dtype=np.int64)
    w.index_of = {r.id: i for i, r in enumerate(recs)}
    w.type_code = np.array([tcode[r.type] for r in recs], dtype=np.int32)

    nfields = len(model.ctx.field_slots)
    w.state = np.zeros((n, nfields), dtype=np.float64)
    w.loc = np.zeros((n, 2), dtype=np.float64)
    for i, r in enumerate(recs):
        model.check_record(r)
        for fd in model.state_schema[r.type]:
            v = r.state.get(fd.name, fd.default)
            col = model.ctx.field_slots[fd.name]
            if fd.type == "symbol":
                w.state[i, col] = float(model.ctx.symbol_code(str(v)))
            else:
                w.state[i, col] = float(v)
        w.loc[i, 0] = float(r.location[0])
        w.loc[i, 1] = float(r.location[1])

    w.nbr_indptr = np.zeros(n + 1, dtype=np.int64)
    data = []
    for i, r in enumerate(recs):
        for nid in r.neighborhood:
            if nid not in w.index_of:
                raise GeosimError(
                    f"automaton {r.id} lists missing neighbor {nid}")
            data.append(w.index_of[nid])
        w.nbr_indptr[i + 1] = len(data)
    w.nbr_data = np.array(data, dtype=np.int32) if data else np.zeros(0, dtype=np.int32)

    if w.kind == K.KIND_LATTICE:
        cells = (w.loc[:, 1].astype(np.int64) * w.width
                 + w.loc[:, 0].astype(np.int64))
        order = np.argsort(cells, kind="stable").astype(np.int32)
        counts = np.bincount(cells, minlength=w.width * w.height)
        w.cell_indptr = np.zeros(w.width * w.height + 1, dtype=np.int64)
        np.cumsum(counts, out=w.cell_indptr[1:])
        w.cell_data = order
    else:
        w.cell_indptr = np.zeros(1, dtype=np.int64)
        w.cell_data = np.zeros(0, dtype=np.int32)

    w.params = np.array(model.param_values(params), dtype=np.float64)
    return w


def lift_state(model: GasModel, type_name: str, row) -> dict:
    """Array row back to a typed state dict."""
    sym_names = _symbol_names(model)
    out = {}
    for fd in model.state_schema[type_name]:
        v = row[model.ctx.field_slots[fd.name]]
        if fd.type == "symbol":
            out[fd.name] = sym_names[int(v)]
        elif fd.type == "bool":
            out[fd.name] = v != 0.0
        else:
            out[fd.name] = float(v)
    return out


def lift_location(model: GasModel, x: float, y: float) -> tuple:
    if model.georef.kind == "lattice":
        return (int(x), int(y))
    return (float(x), float(y))


def lift(model: GasModel, w: LoweredWorld, tick: int,
         state, loc, nbr_lists) -> GasSnapshot:
    automata = {}
    for i in range(w.n):
        aid = int(w.ids[i])
        tname = w.type_names[w.type_code[i]]
        automata[aid] = AutomatonRecord(
            id=aid,
            type=tname,
            state=lift_state(model, tname, state[i]),
            location=lift_location(model, loc[i][0], loc[i][1]),
            neighborhood=tuple(sorted(int(w.ids[j]) for j in nbr_lists[i])),
        )
    return GasSnapshot(tick=tick, automata=automata)


def _symbol_names(model: GasModel) -> list[str]:
    names = [None] * len(model.ctx.symbols)
    for name, code in model.ctx.symbols.items():
        names[code] = name
    return names
