"""Pure-Python rule tape evaluator.

Reference implementation of the kernel contract: the compiled extension in
_core.pyx is an op-for-op twin, and the two must produce bit-identical
results. Keep any semantic change here mirrored there.

Evaluation of one automaton never reads another automaton's outputs, only
the pre-step arrays, so iterating in any order commits the same step.
Random draws come from splitmix64 streams keyed by (seed, automaton id,
tick, stream name); the three rules of one automaton share stream state in
transition, movement, adjacency order.
"""

from __future__ import annotations

import math

from geosim.kernels import ops as K
from geosim.rng import GOLDEN, MASK, derive_state, mix64

NAME = "pure"
COMPILED = False


class _Ctx:
    """World arrays unpacked into plain Python structures."""

    __slots__ = ("kind", "width", "height", "boundary", "x0", "y0", "x1", "y1",
                 "n", "ids", "type_code", "metric", "state", "loc", "nbr",
                 "params", "cell_map", "occupied")

    def __init__(self, w):
        self.kind = w.kind
        self.width = w.width
        self.height = w.height
        self.boundary = w.boundary
        self.x0, self.y0, self.x1, self.y1 = w.x0, w.y0, w.x1, w.y1
        self.n = w.n
        self.ids = w.ids.tolist()
        self.type_code = w.type_code.tolist()
        self.metric = w.metric.tolist()
        self.state = w.state.tolist()
        self.loc = w.loc.tolist()
        indptr = w.nbr_indptr.tolist()
        data = w.nbr_data.tolist()
        self.nbr = [data[indptr[i]:indptr[i + 1]] for i in range(w.n)]
        self.params = w.params.tolist()
        self.cell_map = {}
        if self.kind == K.KIND_LATTICE:
            cptr = w.cell_indptr.tolist()
            cdata = w.cell_data.tolist()
            for c in range(len(cptr) - 1):
                if cptr[c] != cptr[c + 1]:
                    self.cell_map[c] = cdata[cptr[c]:cptr[c + 1]]
        self.occupied = set(self.cell_map)


def _pyprog(rule):
    cached = getattr(rule, "_py", None)
    if cached is None:
        cached = (rule.code.tolist(), rule.consts.tolist(),
                  rule.subs.tolist(), [int(k) for k in rule.stream_keys])
        rule._py = cached
    return cached


class _Streams:
    """Lazy per-automaton splitmix64 streams, one per stream slot."""

    __slots__ = ("seed", "aid", "tick", "states")

    def __init__(self, seed, aid, tick):
        self.seed = seed
        self.aid = aid
        self.tick = tick
        self.states = {}

    def uniform(self, key: int) -> float:
        s = self.states.get(key)
        if s is None:
            s = derive_state(self.seed, self.aid, self.tick, key)
        s = (s + GOLDEN) & MASK
        self.states[key] = s
        return (mix64(s) >> 11) * (1.0 / 9007199254740992.0)


def _cells_square(ctx, x, y, ri):
    """Unique lattice cells with Chebyshev distance <= ri, row-major."""
    torus = ctx.boundary == K.BOUNDARY_TORUS
    if torus:
        if 2 * ri + 1 >= ctx.width:
            xs = list(range(ctx.width))
        else:
            xs = sorted((x + dx) % ctx.width for dx in range(-ri, ri + 1))
        if 2 * ri + 1 >= ctx.height:
            ys = list(range(ctx.height))
        else:
            ys = sorted((y + dy) % ctx.height for dy in range(-ri, ri + 1))
    else:
        xs = list(range(max(0, x - ri), min(ctx.width, x + ri + 1)))
        ys = list(range(max(0, y - ri), min(ctx.height, y + ri + 1)))
    return xs, ys


def _lattice_dist(ctx, metric, ax, ay, bx, by):
    dx = abs(ax - bx)
    dy = abs(ay - by)
    if ctx.boundary == K.BOUNDARY_TORUS:
        if ctx.width - dx < dx:
            dx = ctx.width - dx
        if ctx.height - dy < dy:
            dy = ctx.height - dy
    if metric == K.METRIC_CHEBYSHEV:
        return float(max(dx, dy))
    if metric == K.METRIC_MANHATTAN:
        return float(dx + dy)
    return math.sqrt(float(dx * dx + dy * dy))


def _within_elements(ctx, i, radius):
    """Automaton indices within radius of automaton i, excluding i."""
    metric = ctx.metric[ctx.type_code[i]]
    out = []
    if ctx.kind == K.KIND_LATTICE:
        if radius < 0.0:
            return out
        x = int(ctx.loc[i][0])
        y = int(ctx.loc[i][1])
        ri = int(math.floor(radius))
        xs, ys = _cells_square(ctx, x, y, ri)
        for cy in ys:
            for cx in xs:
                if _lattice_dist(ctx, metric, x, y, cx, cy) > radius:
                    continue
                for j in ctx.cell_map.get(cy * ctx.width + cx, ()):
                    if j != i:
                        out.append(j)
        out.sort()
    else:
        xi, yi = ctx.loc[i]
        for j in range(ctx.n):
            if j == i:
                continue
            dx = ctx.loc[j][0] - xi
            dy = ctx.loc[j][1] - yi
            if math.sqrt(dx * dx + dy * dy) <= radius:
                out.append(j)
    return out


def _vacant_cells(ctx, i, radius):
    """Vacant candidate cells for a random jump, row-major order."""
    cells = []
    if radius is None:
        for c in range(ctx.width * ctx.height):
            if c not in ctx.occupied:
                cells.append(c)
        return cells
    if radius < 0.0:
        return cells
    metric = ctx.metric[ctx.type_code[i]]
    x = int(ctx.loc[i][0])
    y = int(ctx.loc[i][1])
    ri = int(math.floor(radius))
    xs, ys = _cells_square(ctx, x, y, ri)
    for cy in ys:
        for cx in xs:
            if _lattice_dist(ctx, metric, x, y, cx, cy) > radius:
                continue
            c = cy * ctx.width + cx
            if c not in ctx.occupied:
                cells.append(c)
    return cells


def _resolve_loc(ctx, x, y):
    """Boundary-resolve a raw movement result; 0 status on success."""
    if ctx.kind == K.KIND_LATTICE:
        if x != math.floor(x) or y != math.floor(y):
            return K.ERR_NONINT_COORD, 0.0, 0.0
        xi = int(x)
        yi = int(y)
        if ctx.boundary == K.BOUNDARY_TORUS:
            xi %= ctx.width
            yi %= ctx.height
        else:
            xi = min(max(xi, 0), ctx.width - 1)
            yi = min(max(yi, 0), ctx.height - 1)
        return K.OK, float(xi), float(yi)
    if ctx.boundary == K.BOUNDARY_TORUS:
        w = ctx.x1 - ctx.x0
        h = ctx.y1 - ctx.y0
        x = math.fmod(x - ctx.x0, w)
        if x < 0.0:
            x += w
        y = math.fmod(y - ctx.y0, h)
        if y < 0.0:
            y += h
        return K.OK, ctx.x0 + x, ctx.y0 + y
    return K.OK, min(max(x, ctx.x0), ctx.x1), min(max(y, ctx.y0), ctx.y1)


def _run(ctx, prog, start, i, j, streams, out_row, out_loc, out_nbr):
    """Execute one tape from `start` for automaton i.

    j >= 0 marks aggregate-element context. Returns (status, top-of-stack).
    out_row, out_loc, out_nbr receive side effects of STORE and root ops.
    """
    code, consts, subs, stream_keys = _pyprog(prog)
    stack = []
    push = stack.append
    pop = stack.pop
    ip = start
    while True:
        op, a, b = code[ip]
        ip += 1
        if op == K.OP_END:
            return K.OK, (stack[-1] if stack else 0.0)
        if op == K.OP_CONST:
            push(consts[a])
        elif op == K.OP_LOAD_SELF:
            push(ctx.state[i][a])
        elif op == K.OP_LOAD_OTHER:
            if j < 0:
                return K.ERR_BAD_OP, 0.0
            push(ctx.state[j][a])
        elif op == K.OP_LOAD_SELF_X:
            push(ctx.loc[i][0])
        elif op == K.OP_LOAD_SELF_Y:
            push(ctx.loc[i][1])
        elif op == K.OP_LOAD_OTHER_X:
            if j < 0:
                return K.ERR_BAD_OP, 0.0
            push(ctx.loc[j][0])
        elif op == K.OP_LOAD_OTHER_Y:
            if j < 0:
                return K.ERR_BAD_OP, 0.0
            push(ctx.loc[j][1])
        elif op == K.OP_LOAD_PARAM:
            push(ctx.params[a])
        elif op == K.OP_ADD:
            v = pop()
            stack[-1] += v
        elif op == K.OP_SUB:
            v = pop()
            stack[-1] -= v
        elif op == K.OP_MUL:
            v = pop()
            stack[-1] *= v
        elif op == K.OP_DIV:
            v = pop()
            if v == 0.0:
                return K.ERR_DIV_ZERO, 0.0
            stack[-1] /= v
        elif op == K.OP_MOD:
            v = pop()
            if v == 0.0:
                return K.ERR_DIV_ZERO, 0.0
            stack[-1] = math.fmod(stack[-1], v)
        elif op == K.OP_NEG:
            stack[-1] = -stack[-1]
        elif op == K.OP_LT:
            v = pop()
            stack[-1] = 1.0 if stack[-1] < v else 0.0
        elif op == K.OP_LE:
            v = pop()
            stack[-1] = 1.0 if stack[-1] <= v else 0.0
        elif op == K.OP_GT:
            v = pop()
            stack[-1] = 1.0 if stack[-1] > v else 0.0
        elif op == K.OP_GE:
            v = pop()
            stack[-1] = 1.0 if stack[-1] >= v else 0.0
        elif op == K.OP_EQ:
            v = pop()
            stack[-1] = 1.0 if stack[-1] == v else 0.0
        elif op == K.OP_NE:
            v = pop()
            stack[-1] = 1.0 if stack[-1] != v else 0.0
        elif op == K.OP_AND:
            v = pop()
            stack[-1] = 1.0 if (stack[-1] != 0.0 and v != 0.0) else 0.0
        elif op == K.OP_OR:
            v = pop()
            stack[-1] = 1.0 if (stack[-1] != 0.0 or v != 0.0) else 0.0
        elif op == K.OP_NOT:
            stack[-1] = 0.0 if stack[-1] != 0.0 else 1.0
        elif op == K.OP_JMP:
            ip = a
        elif op == K.OP_JIF:
            if pop() == 0.0:
                ip = a
        elif op == K.OP_AGG:
            dom_kind, sub_start, _end = subs[b]
            radius = pop() if dom_kind == K.DOM_WITHIN else 0.0
            default = pop() if a in (K.AGG_MIN, K.AGG_MAX) else 0.0
            elements = (ctx.nbr[i] if dom_kind == K.DOM_NEIGHBORS
                        else _within_elements(ctx, i, radius))
            if a == K.AGG_COUNT:
                c = 0
                for el in elements:
                    st, v = _run(ctx, prog, sub_start, i, el, streams,
                                 None, None, None)
                    if st:
                        return st, 0.0
                    if v != 0.0:
                        c += 1
                push(float(c))
            elif a == K.AGG_FRACTION:
                c = 0
                for el in elements:
                    st, v = _run(ctx, prog, sub_start, i, el, streams,
                                 None, None, None)
                    if st:
                        return st, 0.0
                    if v != 0.0:
                        c += 1
                push(float(c) / float(len(elements)) if elements else 0.0)
            else:
                best = 0.0
                have = False
                for el in elements:
                    st, v = _run(ctx, prog, sub_start, i, el, streams,
                                 None, None, None)
                    if st:
                        return st, 0.0
                    if not have:
                        best = v
                        have = True
                    elif a == K.AGG_MIN:
                        if v < best:
                            best = v
                    elif v > best:
                        best = v
                push(best if have else default)
        elif op == K.OP_RANDOM:
            push(streams.uniform(int(stream_keys[a])))
        elif op == K.OP_CHOOSE:
            u = streams.uniform(int(stream_keys[a]))
            picked = stack[len(stack) - b + int(u * b)]
            del stack[len(stack) - b:]
            push(picked)
        elif op == K.OP_STORE:
            out_row[a] = pop()
        elif op == K.OP_LOC_STAY:
            out_loc[0] = ctx.loc[i][0]
            out_loc[1] = ctx.loc[i][1]
        elif op == K.OP_LOC_JUMP:
            y = pop()
            x = pop()
            st, rx, ry = _resolve_loc(ctx, x, y)
            if st:
                return st, 0.0
            out_loc[0] = rx
            out_loc[1] = ry
        elif op == K.OP_LOC_STEP:
            dy = pop()
            dx = pop()
            st, rx, ry = _resolve_loc(ctx, ctx.loc[i][0] + dx, ctx.loc[i][1] + dy)
            if st:
                return st, 0.0
            out_loc[0] = rx
            out_loc[1] = ry
        elif op == K.OP_LOC_RANDVAC:
            radius = pop() if a else None
            cells = _vacant_cells(ctx, i, radius)
            if cells:
                c = cells[int(streams.uniform(int(stream_keys[b])) * len(cells))]
                out_loc[0] = float(c % ctx.width)
                out_loc[1] = float(c // ctx.width)
            else:
                out_loc[0] = ctx.loc[i][0]
                out_loc[1] = ctx.loc[i][1]
        elif op == K.OP_NBR_KEEP:
            out_nbr.extend(ctx.nbr[i])
        elif op == K.OP_NBR_NONE:
            pass
        elif op == K.OP_NBR_WITHIN:
            out_nbr.extend(_within_elements(ctx, i, pop()))
        else:
            return K.ERR_BAD_OP, 0.0


def _eval_one(ctx, rule, i, streams):
    """Run one compiled rule for automaton i; returns (status, payload)."""
    if rule.kind == "transition":
        out_row = list(ctx.state[i])
        st, _ = _run(ctx, rule, 0, i, -1, streams, out_row, None, None)
        return st, out_row
    if rule.kind == "movement":
        out_loc = [ctx.loc[i][0], ctx.loc[i][1]]
        st, _ = _run(ctx, rule, 0, i, -1, streams, None, out_loc, None)
        return st, (out_loc[0], out_loc[1])
    out_nbr: list[int] = []
    st, _ = _run(ctx, rule, 0, i, -1, streams, None, None, out_nbr)
    return st, sorted(out_nbr)


def eval_rule(world, rule, i, tick, seed):
    """Single-rule entry point used by the one-automaton operations."""
    ctx = _Ctx(world)
    streams = _Streams(seed, int(ctx.ids[i]), tick)
    return _eval_one(ctx, rule, i, streams)


def run_step(world, programs, tick, seed):
    """Evaluate all three rule maps for every automaton against the
    pre-step world.

    Returns (errors, state_rows, locs, nbr_lists); a non-empty error list
    means the step must be discarded. Errors carry (index, rule name,
    status code). On the first failing rule of an automaton its remaining
    rules are skipped, but all other automata are still evaluated.
    """
    ctx = _Ctx(world)
    new_state = []
    new_loc = []
    new_nbr = []
    errors = []
    for i in range(ctx.n):
        t_rule, m_rule, a_rule = programs[ctx.type_code[i]]
        streams = _Streams(seed, int(ctx.ids[i]), tick)
        failed = False
        for rule in (t_rule, m_rule, a_rule):
            st, payload = _eval_one(ctx, rule, i, streams)
            if st:
                errors.append((i, rule.name, st))
                failed = True
                break
            if rule.kind == "transition":
                row = payload
            elif rule.kind == "movement":
                loc = payload
            else:
                nbr = payload
        if failed:
            new_state.append(list(ctx.state[i]))
            new_loc.append((ctx.loc[i][0], ctx.loc[i][1]))
            new_nbr.append(list(ctx.nbr[i]))
        else:
            new_state.append(row)
            new_loc.append(loc)
            new_nbr.append(nbr)
    return errors, new_state, new_loc, new_nbr
