"""Brute-force step evaluators, written independently of the kernel.

These walk plain dicts with naive loops; they share nothing with the
instruction tape, the lowering, or the geometry helpers. Deliberately
duplicated logic: this is the second route the kernel is checked against.
"""


def torus_cheb(ax, ay, bx, by, w, h):
    dx = abs(ax - bx)
    dy = abs(ay - by)
    dx = min(dx, w - dx)
    dy = min(dy, h - dy)
    return max(dx, dy)


def majority_step(cells, neighbor_ids, field="s"):
    """cells: id -> state value; neighbor_ids: id -> iterable of ids."""
    out = {}
    for aid, value in cells.items():
        ones = sum(1 for nid in neighbor_ids[aid] if cells[nid] == 1)
        zeros = sum(1 for nid in neighbor_ids[aid] if cells[nid] == 0)
        if ones > zeros:
            out[aid] = 1
        elif zeros > ones:
            out[aid] = 0
        else:
            out[aid] = value
    return out


def life_step(alive, positions, w, h):
    """alive: id -> 0/1; positions: id -> (x, y) on a torus lattice."""
    out = {}
    for aid, (x, y) in positions.items():
        n = 0
        for bid, (bx, by) in positions.items():
            if bid == aid:
                continue
            if torus_cheb(x, y, bx, by, w, h) <= 1 and alive[bid] == 1:
                n += 1
        if alive[aid] == 1:
            out[aid] = 1 if n in (2, 3) else 0
        else:
            out[aid] = 1 if n == 3 else 0
    return out


def schelling_satisfaction(groups, positions, w, h, threshold):
    """id -> unsatisfied flag, same counting rule as the shipped scenario."""
    out = {}
    for aid, (x, y) in positions.items():
        same = 0
        occ = 0
        for bid, (bx, by) in positions.items():
            if bid == aid:
                continue
            if torus_cheb(x, y, bx, by, w, h) <= 1:
                occ += 1
                if groups[bid] == groups[aid]:
                    same += 1
        out[aid] = same < threshold * occ
    return out


def elect_goals(worlds_pi, desire_worlds, justified):
    """Exhaustive goal election over every subset of justified desires.

    worlds_pi: world -> possibility; desire_worlds: desire -> set of
    worlds where it holds. Returns (best subset, possibility value).
    Candidates are nonempty subsets satisfiable in some world of positive
    possibility, ranked by possibility, then size, then lexicographic ids;
    the empty set (value 1.0) is the fallback.
    """
    justified = sorted(justified)
    best = None
    for mask in range(1, 1 << len(justified)):
        subset = [d for k, d in enumerate(justified) if mask >> k & 1]
        pi = 0.0
        for w, p in worlds_pi.items():
            if all(w in desire_worlds[d] for d in subset):
                pi = max(pi, p)
        if pi <= 0.0:
            continue
        cand = (pi, len(subset), subset)
        if best is None:
            best = cand
        else:
            if (cand[0], cand[1]) > (best[0], best[1]):
                best = cand
            elif (cand[0], cand[1]) == (best[0], best[1]) and cand[2] < best[2]:
                best = cand
    if best is None:
        return frozenset(), 1.0
    return frozenset(best[2]), best[0]


def retrieval_scores(records, query_words, now, w_r=1.0, w_m=1.0, decay=0.99):
    """record -> score, the documented recency + keyword formula."""
    out = {}
    qw = set(query_words)
    for idx, (tick, words) in enumerate(records):
        recency = decay ** (now - tick)
        match = (len(qw & set(words)) / len(qw)) if qw else 0.0
        out[idx] = w_r * recency + w_m * match
    return out
