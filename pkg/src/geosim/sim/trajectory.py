"""Line-delimited trajectory records.

One UTF-8 JSON object per line, fields in a fixed order, no timestamps:
identical runs must produce byte-identical streams. Record kinds:

    header     run metadata (scenario digest, seed)
    automaton  one automaton at one tick
    entity     one environment entity at one tick
    layer      one layer's parameters at one tick
    agent_state per-agent internal state dump (opt-in)
    event      one processed scheduler event (opt-in trace stream)
"""

from __future__ import annotations

import hashlib
import json


def _jnum(v: float):
    f = float(v)
    return int(f) if f.is_integer() else f


def _jstate(schema, state: dict):
    out = {}
    for fd in schema:
        v = state.get(fd.name, fd.default)
        if fd.type == "number":
            out[fd.name] = _jnum(v)
        elif fd.type == "bool":
            out[fd.name] = bool(v)
        else:
            out[fd.name] = str(v)
    return out


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def header_line(scenario_digest: str, seed: int) -> str:
    return _dump({"record": "header", "scenario_digest": scenario_digest,
                  "seed": seed})


def automaton_line(model, tick: int, rec) -> str:
    schema = model.state_schema[rec.type]
    loc = list(rec.location)
    if model.georef.kind == "lattice":
        loc = [int(v) for v in loc]
    return _dump({
        "record": "automaton",
        "tick": tick,
        "id": rec.id,
        "type": rec.type,
        "state": _jstate(schema, rec.state),
        "location": loc,
        "neighborhood": sorted(rec.neighborhood),
    })


def snapshot_lines(model, snapshot) -> list[str]:
    return [automaton_line(model, snapshot.tick, rec)
            for rec in snapshot.ordered()]


def layer_line(tick: int, layer_name: str, params: dict) -> str:
    return _dump({
        "record": "layer",
        "tick": tick,
        "layer": layer_name,
        "params": {k: _jnum(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
                   for k, v in sorted(params.items())},
    })


def entity_line(tick: int, entity, schema=()) -> str:
    loc = list(entity.location)
    return _dump({
        "record": "entity",
        "tick": tick,
        "id": entity.id,
        "kind": entity.kind,
        "type": entity.type_name or "",
        "state": _jstate(schema, entity.state) if schema else
                 {k: entity.state[k] for k in sorted(entity.state)},
        "location": loc,
        "shape": list(entity.shape),
    })


def agent_state_line(tick: int, agent_id: int, state) -> str:
    return _dump({
        "record": "agent_state",
        "tick": tick,
        "id": agent_id,
        "beliefs": {k: [state.beliefs[k][0], state.beliefs[k][1]]
                    for k in sorted(state.beliefs)},
        "goals": [[g.id, g.kind, bool(g.active)] for g in state.goals],
        "intentions": list(state.intentions),
        "commitments": [[c.id, sorted(c.members), c.goal, c.origin_tick]
                        for c in state.commitments],
        "plans": [[p.id, list(p.steps), p.cursor]
                  for p in sorted(state.plans.values(), key=lambda p: p.id)],
        "history_len": len(state.history),
    })


def event_line(ev) -> str:
    return _dump({
        "record": "event",
        "time": _jnum(ev.time),
        "priority": ev.priority,
        "seq": ev.seq,
        "target": list(ev.target) if isinstance(ev.target, tuple) else ev.target,
        "payload": ev.payload if isinstance(ev.payload, (str, int, float, type(None)))
                   else str(ev.payload),
    })


def digest(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def _flat(value) -> str:
    if isinstance(value, dict):
        return " ".join(f"{k}={_flat(v)}" for k, v in value.items())
    if isinstance(value, list):
        return ",".join(_flat(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def to_table(lines) -> list[str]:
    """Record lines to an aligned plain-text table, one row per record."""
    rows = []
    for line in lines:
        rec = json.loads(line)
        kind = rec.pop("record")
        if kind == "header":
            rows.append(("#", "", "", "",
                         f"digest={rec['scenario_digest']} seed={rec['seed']}"))
            continue
        tick = str(rec.pop("tick", ""))
        rid = str(rec.pop("id", rec.pop("layer", "")))
        rtype = str(rec.pop("type", rec.pop("kind", "")))
        rest = " ".join(f"{k}={_flat(v)}" for k, v in rec.items())
        rows.append((tick, kind, rid, rtype, rest))
    widths = [max((len(r[i]) for r in rows), default=1) for i in range(4)]
    out = []
    for r in rows:
        cells = [r[i].ljust(widths[i]) for i in range(4)]
        out.append(("  ".join(cells) + "  " + r[4]).rstrip())
    return out
