# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rule tape evaluator.

Op-for-op twin of geosim.kernels._pure; results must be bit-identical.
Any semantic change there must land here too. The backend equivalence
tests and the benchmark drive both implementations over the same inputs.
"""

from libc.math cimport floor, fmod, sqrt
from libc.stdint cimport int32_t, int64_t, uint64_t
from libc.stdlib cimport free, malloc, qsort

import numpy as np

NAME = "compiled"
COMPILED = True

cdef enum:
    OP_END = 0
    OP_CONST = 1
    OP_LOAD_SELF = 2
    OP_LOAD_OTHER = 3
    OP_LOAD_SELF_X = 4
    OP_LOAD_SELF_Y = 5
    OP_LOAD_OTHER_X = 6
    OP_LOAD_OTHER_Y = 7
    OP_LOAD_PARAM = 8
    OP_ADD = 9
    OP_SUB = 10
    OP_MUL = 11
    OP_DIV = 12
    OP_MOD = 13
    OP_NEG = 14
    OP_LT = 15
    OP_LE = 16
    OP_GT = 17
    OP_GE = 18
    OP_EQ = 19
    OP_NE = 20
    OP_AND = 21
    OP_OR = 22
    OP_NOT = 23
    OP_JMP = 24
    OP_JIF = 25
    OP_AGG = 26
    OP_RANDOM = 27
    OP_CHOOSE = 28
    OP_STORE = 29
    OP_LOC_STAY = 30
    OP_LOC_JUMP = 31
    OP_LOC_STEP = 32
    OP_LOC_RANDVAC = 33
    OP_NBR_KEEP = 34
    OP_NBR_NONE = 35
    OP_NBR_WITHIN = 36

cdef enum:
    AGG_COUNT = 0
    AGG_FRACTION = 1
    AGG_MIN = 2
    AGG_MAX = 3

cdef enum:
    DOM_NEIGHBORS = 0
    DOM_WITHIN = 1

cdef enum:
    METRIC_CHEBYSHEV = 0
    METRIC_MANHATTAN = 1

cdef enum:
    KIND_LATTICE = 0
    BOUNDARY_TORUS = 1

cdef enum:
    OK = 0
    ERR_DIV_ZERO = 1
    ERR_NONINT_COORD = 2
    ERR_STACK = 3
    ERR_BAD_OP = 4

cdef enum:
    MAX_STACK = 128
    MAX_STREAMS = 32

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef inline uint64_t derive3(uint64_t seed, uint64_t a, uint64_t b,
                             uint64_t c) noexcept nogil:
    cdef uint64_t s = seed
    s = mix64((s + GOLDEN) ^ a)
    s = mix64((s + GOLDEN) ^ b)
    s = mix64((s + GOLDEN) ^ c)
    return s


cdef struct Prog:
    int64_t* code
    double* consts
    int64_t* subs
    uint64_t* skeys


cdef int _cmp_i32(const void* a, const void* b) noexcept nogil:
    cdef int32_t x = (<const int32_t*> a)[0]
    cdef int32_t y = (<const int32_t*> b)[0]
    return (x > y) - (x < y)


cdef inline void _axis_segments(int x, int ri, int size, bint torus,
                                int* a0, int* a1, int* b0, int* b1) noexcept nogil:
    """Sorted coordinates within distance ri of x as up to two inclusive
    segments [a0, a1] then [b0, b1]; the second is empty when b0 > b1."""
    b0[0] = 1
    b1[0] = 0
    if not torus:
        a0[0] = x - ri if x - ri > 0 else 0
        a1[0] = x + ri if x + ri < size - 1 else size - 1
        return
    if 2 * ri + 1 >= size:
        a0[0] = 0
        a1[0] = size - 1
        return
    if x - ri >= 0 and x + ri < size:
        a0[0] = x - ri
        a1[0] = x + ri
        return
    a0[0] = 0
    a1[0] = (x + ri) % size
    b0[0] = ((x - ri) % size + size) % size
    b1[0] = size - 1


cdef class _Kernel:
    cdef double[:, ::1] state
    cdef double[:, ::1] loc
    cdef int64_t[::1] ids
    cdef int32_t[::1] type_code
    cdef int32_t[::1] metric
    cdef double[::1] params
    cdef int64_t[::1] nbr_indptr
    cdef int32_t[::1] nbr_data
    cdef int64_t[::1] cell_indptr
    cdef int32_t[::1] cell_data
    cdef int kind, width, height, boundary, n, nfields
    cdef double x0, y0, x1, y1
    cdef uint64_t seed
    cdef uint64_t tick
    cdef uint64_t strm_keys[MAX_STREAMS]
    cdef uint64_t strm_states[MAX_STREAMS]
    cdef int strm_count
    cdef uint64_t cur_id
    cdef int32_t* nbr_buf
    cdef int nbr_count
    cdef int32_t* vac_buf
    cdef double out_loc[2]

    def __cinit__(self, world, tick, seed):
        self.state = world.state
        self.loc = world.loc
        self.ids = world.ids
        self.type_code = world.type_code
        self.metric = world.metric
        self.params = world.params
        self.nbr_indptr = world.nbr_indptr
        self.nbr_data = world.nbr_data
        self.cell_indptr = world.cell_indptr
        self.cell_data = world.cell_data
        self.kind = world.kind
        self.width = world.width
        self.height = world.height
        self.boundary = world.boundary
        self.n = world.n
        self.nfields = world.state.shape[1]
        self.x0 = world.x0
        self.y0 = world.y0
        self.x1 = world.x1
        self.y1 = world.y1
        self.seed = <uint64_t> seed
        self.tick = <uint64_t> tick
        self.strm_count = 0
        self.cur_id = 0
        self.nbr_buf = <int32_t*> malloc(max(world.n, 1) * sizeof(int32_t))
        cdef long cells = (world.width * world.height
                           if self.kind == KIND_LATTICE else 1)
        self.vac_buf = <int32_t*> malloc(max(cells, 1) * sizeof(int32_t))

    def __dealloc__(self):
        free(self.nbr_buf)
        free(self.vac_buf)

    cdef double _uniform(self, uint64_t key) noexcept nogil:
        cdef int k
        cdef uint64_t s
        for k in range(self.strm_count):
            if self.strm_keys[k] == key:
                s = self.strm_states[k] + GOLDEN
                self.strm_states[k] = s
                return <double> (mix64(s) >> 11) * INV53
        k = self.strm_count
        if k >= MAX_STREAMS:
            k = MAX_STREAMS - 1
        else:
            self.strm_count += 1
        self.strm_keys[k] = key
        s = derive3(self.seed, self.cur_id, self.tick, key) + GOLDEN
        self.strm_states[k] = s
        return <double> (mix64(s) >> 11) * INV53

    cdef double _lattice_dist(self, int metric, int ax, int ay,
                              int bx, int by) noexcept nogil:
        cdef int dx = ax - bx if ax >= bx else bx - ax
        cdef int dy = ay - by if ay >= by else by - ay
        if self.boundary == BOUNDARY_TORUS:
            if self.width - dx < dx:
                dx = self.width - dx
            if self.height - dy < dy:
                dy = self.height - dy
        if metric == METRIC_CHEBYSHEV:
            return <double> (dx if dx > dy else dy)
        if metric == METRIC_MANHATTAN:
            return <double> (dx + dy)
        return sqrt(<double> (dx * dx + dy * dy))

    cdef void _within(self, int i, double radius) noexcept nogil:
        """Indices within radius of automaton i, excluding i, into
        nbr_buf; lattice results sorted ascending like the pure twin."""
        cdef int metric = self.metric[self.type_code[i]]
        cdef int count = 0
        cdef int x, y, ri, cx, cy, j
        cdef int xa0, xa1, xb0, xb1, ya0, ya1, yb0, yb1
        cdef int64_t c, p
        cdef double dx, dy
        cdef bint torus = self.boundary == BOUNDARY_TORUS
        if self.kind == KIND_LATTICE:
            if radius < 0.0:
                self.nbr_count = 0
                return
            x = <int> self.loc[i, 0]
            y = <int> self.loc[i, 1]
            if radius > <double> (self.width + self.height):
                ri = self.width + self.height
            else:
                ri = <int> floor(radius)
            _axis_segments(x, ri, self.width, torus, &xa0, &xa1, &xb0, &xb1)
            _axis_segments(y, ri, self.height, torus, &ya0, &ya1, &yb0, &yb1)
            for cy in range(ya0, (yb1 if yb0 <= yb1 else ya1) + 1):
                if cy > ya1 and (yb0 > yb1 or cy < yb0):
                    continue
                for cx in range(xa0, (xb1 if xb0 <= xb1 else xa1) + 1):
                    if cx > xa1 and (xb0 > xb1 or cx < xb0):
                        continue
                    if self._lattice_dist(metric, x, y, cx, cy) > radius:
                        continue
                    c = cy * self.width + cx
                    for p in range(self.cell_indptr[c],
                                   self.cell_indptr[c + 1]):
                        j = self.cell_data[p]
                        if j != i:
                            self.nbr_buf[count] = j
                            count += 1
            qsort(self.nbr_buf, count, sizeof(int32_t), _cmp_i32)
        else:
            for j in range(self.n):
                if j == i:
                    continue
                dx = self.loc[j, 0] - self.loc[i, 0]
                dy = self.loc[j, 1] - self.loc[i, 1]
                if sqrt(dx * dx + dy * dy) <= radius:
                    self.nbr_buf[count] = j
                    count += 1
        self.nbr_count = count

    cdef int _vacant(self, int i, double radius, bint bounded) noexcept nogil:
        """Vacant candidate cells in row-major order into vac_buf."""
        cdef int count = 0
        cdef int metric = self.metric[self.type_code[i]]
        cdef int x, y, ri, cx, cy
        cdef int xa0, xa1, xb0, xb1, ya0, ya1, yb0, yb1
        cdef int64_t c
        cdef bint torus = self.boundary == BOUNDARY_TORUS
        if not bounded:
            for c in range(self.width * self.height):
                if self.cell_indptr[c] == self.cell_indptr[c + 1]:
                    self.vac_buf[count] = <int32_t> c
                    count += 1
            return count
        if radius < 0.0:
            return 0
        x = <int> self.loc[i, 0]
        y = <int> self.loc[i, 1]
        if radius > <double> (self.width + self.height):
            ri = self.width + self.height
        else:
            ri = <int> floor(radius)
        _axis_segments(x, ri, self.width, torus, &xa0, &xa1, &xb0, &xb1)
        _axis_segments(y, ri, self.height, torus, &ya0, &ya1, &yb0, &yb1)
        for cy in range(ya0, (yb1 if yb0 <= yb1 else ya1) + 1):
            if cy > ya1 and (yb0 > yb1 or cy < yb0):
                continue
            for cx in range(xa0, (xb1 if xb0 <= xb1 else xa1) + 1):
                if cx > xa1 and (xb0 > xb1 or cx < xb0):
                    continue
                if self._lattice_dist(metric, x, y, cx, cy) > radius:
                    continue
                c = cy * self.width + cx
                if self.cell_indptr[c] == self.cell_indptr[c + 1]:
                    self.vac_buf[count] = <int32_t> c
                    count += 1
        return count

    cdef int _resolve_loc(self, double x, double y) noexcept nogil:
        cdef long xi, yi
        cdef double w, h
        if self.kind == KIND_LATTICE:
            if x != floor(x) or y != floor(y):
                return ERR_NONINT_COORD
            xi = <long> x
            yi = <long> y
            if self.boundary == BOUNDARY_TORUS:
                xi = ((xi % self.width) + self.width) % self.width
                yi = ((yi % self.height) + self.height) % self.height
            else:
                if xi < 0:
                    xi = 0
                if xi > self.width - 1:
                    xi = self.width - 1
                if yi < 0:
                    yi = 0
                if yi > self.height - 1:
                    yi = self.height - 1
            self.out_loc[0] = <double> xi
            self.out_loc[1] = <double> yi
            return OK
        if self.boundary == BOUNDARY_TORUS:
            w = self.x1 - self.x0
            h = self.y1 - self.y0
            x = fmod(x - self.x0, w)
            if x < 0.0:
                x += w
            y = fmod(y - self.y0, h)
            if y < 0.0:
                y += h
            self.out_loc[0] = self.x0 + x
            self.out_loc[1] = self.y0 + y
            return OK
        if x < self.x0:
            x = self.x0
        if x > self.x1:
            x = self.x1
        if y < self.y0:
            y = self.y0
        if y > self.y1:
            y = self.y1
        self.out_loc[0] = x
        self.out_loc[1] = y
        return OK

    cdef int run_tape(self, Prog* p, int start, int i, int j,
                      double* out_row, double* result) noexcept nogil:
        cdef double stack[MAX_STACK]
        cdef int sp = 0
        cdef int ip = start
        cdef int64_t op, a, b, dom, sub_start, q, base
        cdef double radius, dflt, best, sub_v, v
        cdef int status, el, cnt, hits, total, k
        cdef bint have
        while True:
            base = ip * 3
            op = p.code[base]
            a = p.code[base + 1]
            b = p.code[base + 2]
            ip += 1
            if op == OP_END:
                result[0] = stack[sp - 1] if sp > 0 else 0.0
                return OK
            if sp >= MAX_STACK - 2:
                return ERR_STACK
            if op == OP_CONST:
                stack[sp] = p.consts[a]
                sp += 1
            elif op == OP_LOAD_SELF:
                stack[sp] = self.state[i, a]
                sp += 1
            elif op == OP_LOAD_OTHER:
                if j < 0:
                    return ERR_BAD_OP
                stack[sp] = self.state[j, a]
                sp += 1
            elif op == OP_LOAD_SELF_X:
                stack[sp] = self.loc[i, 0]
                sp += 1
            elif op == OP_LOAD_SELF_Y:
                stack[sp] = self.loc[i, 1]
                sp += 1
            elif op == OP_LOAD_OTHER_X:
                if j < 0:
                    return ERR_BAD_OP
                stack[sp] = self.loc[j, 0]
                sp += 1
            elif op == OP_LOAD_OTHER_Y:
                if j < 0:
                    return ERR_BAD_OP
                stack[sp] = self.loc[j, 1]
                sp += 1
            elif op == OP_LOAD_PARAM:
                stack[sp] = self.params[a]
                sp += 1
            elif op == OP_ADD:
                sp -= 1
                stack[sp - 1] += stack[sp]
            elif op == OP_SUB:
                sp -= 1
                stack[sp - 1] -= stack[sp]
            elif op == OP_MUL:
                sp -= 1
                stack[sp - 1] *= stack[sp]
            elif op == OP_DIV:
                sp -= 1
                if stack[sp] == 0.0:
                    return ERR_DIV_ZERO
                stack[sp - 1] /= stack[sp]
            elif op == OP_MOD:
                sp -= 1
                if stack[sp] == 0.0:
                    return ERR_DIV_ZERO
                stack[sp - 1] = fmod(stack[sp - 1], stack[sp])
            elif op == OP_NEG:
                stack[sp - 1] = -stack[sp - 1]
            elif op == OP_LT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] < stack[sp] else 0.0
            elif op == OP_LE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] <= stack[sp] else 0.0
            elif op == OP_GT:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] > stack[sp] else 0.0
            elif op == OP_GE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] >= stack[sp] else 0.0
            elif op == OP_EQ:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] == stack[sp] else 0.0
            elif op == OP_NE:
                sp -= 1
                stack[sp - 1] = 1.0 if stack[sp - 1] != stack[sp] else 0.0
            elif op == OP_AND:
                sp -= 1
                stack[sp - 1] = (1.0 if (stack[sp - 1] != 0.0
                                         and stack[sp] != 0.0) else 0.0)
            elif op == OP_OR:
                sp -= 1
                stack[sp - 1] = (1.0 if (stack[sp - 1] != 0.0
                                         or stack[sp] != 0.0) else 0.0)
            elif op == OP_NOT:
                stack[sp - 1] = 0.0 if stack[sp - 1] != 0.0 else 1.0
            elif op == OP_JMP:
                ip = <int> a
            elif op == OP_JIF:
                sp -= 1
                if stack[sp] == 0.0:
                    ip = <int> a
            elif op == OP_AGG:
                dom = p.subs[b * 3]
                sub_start = p.subs[b * 3 + 1]
                radius = 0.0
                if dom == DOM_WITHIN:
                    sp -= 1
                    radius = stack[sp]
                dflt = 0.0
                if a == AGG_MIN or a == AGG_MAX:
                    sp -= 1
                    dflt = stack[sp]
                if dom == DOM_NEIGHBORS:
                    total = <int> (self.nbr_indptr[i + 1] - self.nbr_indptr[i])
                else:
                    self._within(i, radius)
                    total = self.nbr_count
                hits = 0
                best = 0.0
                have = False
                for k in range(total):
                    if dom == DOM_NEIGHBORS:
                        el = self.nbr_data[self.nbr_indptr[i] + k]
                    else:
                        el = self.nbr_buf[k]
                    status = self.run_tape(p, <int> sub_start, i, el,
                                           NULL, &sub_v)
                    if status != OK:
                        return status
                    if a == AGG_COUNT or a == AGG_FRACTION:
                        if sub_v != 0.0:
                            hits += 1
                    elif not have:
                        best = sub_v
                        have = True
                    elif a == AGG_MIN:
                        if sub_v < best:
                            best = sub_v
                    elif sub_v > best:
                        best = sub_v
                if a == AGG_COUNT:
                    stack[sp] = <double> hits
                elif a == AGG_FRACTION:
                    stack[sp] = ((<double> hits) / (<double> total)
                                 if total > 0 else 0.0)
                else:
                    stack[sp] = best if have else dflt
                sp += 1
            elif op == OP_RANDOM:
                stack[sp] = self._uniform(p.skeys[a])
                sp += 1
            elif op == OP_CHOOSE:
                v = self._uniform(p.skeys[a])
                stack[sp - b] = stack[sp - b + <int> (v * b)]
                sp += 1 - <int> b
            elif op == OP_STORE:
                sp -= 1
                out_row[a] = stack[sp]
            elif op == OP_LOC_STAY:
                self.out_loc[0] = self.loc[i, 0]
                self.out_loc[1] = self.loc[i, 1]
            elif op == OP_LOC_JUMP:
                sp -= 2
                status = self._resolve_loc(stack[sp], stack[sp + 1])
                if status != OK:
                    return status
            elif op == OP_LOC_STEP:
                sp -= 2
                status = self._resolve_loc(self.loc[i, 0] + stack[sp],
                                           self.loc[i, 1] + stack[sp + 1])
                if status != OK:
                    return status
            elif op == OP_LOC_RANDVAC:
                radius = 0.0
                if a:
                    sp -= 1
                    radius = stack[sp]
                cnt = self._vacant(i, radius, a != 0)
                if cnt > 0:
                    v = self._uniform(p.skeys[b])
                    q = self.vac_buf[<int> (v * cnt)]
                    self.out_loc[0] = <double> (q % self.width)
                    self.out_loc[1] = <double> (q / self.width)
                else:
                    self.out_loc[0] = self.loc[i, 0]
                    self.out_loc[1] = self.loc[i, 1]
            elif op == OP_NBR_KEEP:
                self.nbr_count = <int> (self.nbr_indptr[i + 1]
                                        - self.nbr_indptr[i])
                for k in range(self.nbr_count):
                    self.nbr_buf[k] = self.nbr_data[self.nbr_indptr[i] + k]
            elif op == OP_NBR_NONE:
                self.nbr_count = 0
            elif op == OP_NBR_WITHIN:
                sp -= 1
                self._within(i, stack[sp])
                qsort(self.nbr_buf, self.nbr_count, sizeof(int32_t), _cmp_i32)
            else:
                return ERR_BAD_OP


_DUMMY_I64 = np.zeros(3, dtype=np.int64)
_DUMMY_F64 = np.zeros(1, dtype=np.float64)
_DUMMY_U64 = np.zeros(1, dtype=np.uint64)


cdef Prog _as_prog(rule, list refs) except *:
    cdef Prog p
    code = np.ascontiguousarray(rule.code.reshape(-1), dtype=np.int64)
    consts = rule.consts if rule.consts.shape[0] else _DUMMY_F64
    consts = np.ascontiguousarray(consts, dtype=np.float64)
    subs = rule.subs.reshape(-1) if rule.subs.shape[0] else _DUMMY_I64
    subs = np.ascontiguousarray(subs, dtype=np.int64)
    skeys = rule.stream_keys if rule.stream_keys.shape[0] else _DUMMY_U64
    skeys = np.ascontiguousarray(skeys, dtype=np.uint64)
    refs.extend((code, consts, subs, skeys))
    cdef int64_t[::1] code_mv = code
    cdef double[::1] consts_mv = consts
    cdef int64_t[::1] subs_mv = subs
    cdef uint64_t[::1] skeys_mv = skeys
    p.code = &code_mv[0]
    p.consts = &consts_mv[0]
    p.subs = &subs_mv[0]
    p.skeys = &skeys_mv[0]
    return p


def eval_rule(world, rule, int i, tick, seed):
    """Single-rule evaluation; mirrors _pure.eval_rule."""
    cdef _Kernel k = _Kernel(world, tick, seed)
    cdef list refs = []
    cdef Prog p = _as_prog(rule, refs)
    cdef double result = 0.0
    cdef int status, m
    cdef double[::1] row_mv
    k.cur_id = <uint64_t> world.ids[i]
    k.strm_count = 0
    if rule.kind == "transition":
        row = np.array(world.state[i], dtype=np.float64, copy=True)
        if row.shape[0] == 0:
            status = k.run_tape(&p, 0, i, -1, NULL, &result)
            return status, []
        row_mv = row
        status = k.run_tape(&p, 0, i, -1, &row_mv[0], &result)
        return status, row.tolist()
    if rule.kind == "movement":
        k.out_loc[0] = world.loc[i, 0]
        k.out_loc[1] = world.loc[i, 1]
        status = k.run_tape(&p, 0, i, -1, NULL, &result)
        return status, (float(k.out_loc[0]), float(k.out_loc[1]))
    k.nbr_count = 0
    status = k.run_tape(&p, 0, i, -1, NULL, &result)
    out_n = [k.nbr_buf[m] for m in range(k.nbr_count)]
    out_n.sort()
    return status, out_n


def run_step(world, programs, tick, seed):
    """Full synchronous step; output shape mirrors _pure.run_step."""
    cdef _Kernel k = _Kernel(world, tick, seed)
    cdef list refs = []
    cdef int n_types = len(programs)
    cdef Prog* progs = <Prog*> malloc(max(n_types, 1) * 3 * sizeof(Prog))
    cdef int t, r, i, tc, status, m, f
    cdef double result = 0.0
    cdef double[:, ::1] out_state
    cdef double[:, ::1] in_state = world.state
    names = []
    new_loc = []
    new_nbr = []
    errors = []
    try:
        for t in range(n_types):
            for r in range(3):
                progs[t * 3 + r] = _as_prog(programs[t][r], refs)
            names.append((programs[t][0].name, programs[t][1].name,
                          programs[t][2].name))
        new_state = np.array(world.state, dtype=np.float64, copy=True)
        if k.nfields == 0:
            new_state = np.zeros((k.n, 1), dtype=np.float64)
        out_state = new_state

        for i in range(k.n):
            tc = world.type_code[i]
            k.cur_id = <uint64_t> world.ids[i]
            k.strm_count = 0
            status = k.run_tape(&progs[tc * 3], 0, i, -1,
                                &out_state[i, 0], &result)
            if status == OK:
                k.out_loc[0] = k.loc[i, 0]
                k.out_loc[1] = k.loc[i, 1]
                status = k.run_tape(&progs[tc * 3 + 1], 0, i, -1,
                                    NULL, &result)
                if status != OK:
                    errors.append((i, names[tc][1], status))
            else:
                errors.append((i, names[tc][0], status))
            if status == OK:
                new_loc.append((float(k.out_loc[0]), float(k.out_loc[1])))
                k.nbr_count = 0
                status = k.run_tape(&progs[tc * 3 + 2], 0, i, -1,
                                    NULL, &result)
                if status != OK:
                    errors.append((i, names[tc][2], status))
                    new_loc.pop()
            if status != OK:
                # discard partial effects: pure backend reverts the row too
                for f in range(k.nfields):
                    out_state[i, f] = in_state[i, f]
                new_loc.append((float(world.loc[i, 0]), float(world.loc[i, 1])))
                new_nbr.append([int(v) for v in
                                world.nbr_data[world.nbr_indptr[i]:
                                               world.nbr_indptr[i + 1]]])
                continue
            nbrs = [k.nbr_buf[m] for m in range(k.nbr_count)]
            nbrs.sort()
            new_nbr.append(nbrs)
        if k.nfields == 0:
            return errors, [[] for _ in range(k.n)], new_loc, new_nbr
        return errors, new_state, new_loc, new_nbr
    finally:
        free(progs)
