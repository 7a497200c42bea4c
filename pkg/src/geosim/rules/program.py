"""Compiler from rule expression trees to the kernel instruction tape.

The compiler assumes the tree already passed validation: names resolve,
types line up, aggregates keep out of contexts they are not allowed in.
Anything else here is a defect, raised as CompileError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geosim.errors import CompileError
from geosim.kernels import ops as K
from geosim.rng import string_key
from geosim.rules import ast as R


@dataclass
class CompiledRule:
    """A rule ready for the kernel: tape, pools, and its source tree."""

    name: str
    kind: str                 # transition | movement | adjacency
    code: np.ndarray          # int64 (L, 3)
    consts: np.ndarray        # float64
    subs: np.ndarray          # int64 (S, 3): domain kind, start, end
    stream_keys: np.ndarray   # uint64, indexed by stream slot
    source: object = None     # the rule AST it was compiled from

    def __eq__(self, other):
        return isinstance(other, CompiledRule) and self.source == other.source

    def __hash__(self):
        return hash((self.name, self.kind))


class RuleContext:
    """Name interning shared by every rule of one compiled model."""

    def __init__(self, field_slots: dict[str, int], param_slots: dict[str, int],
                 symbols: dict[str, int]):
        self.field_slots = field_slots
        self.param_slots = param_slots
        self.symbols = symbols

    def symbol_code(self, name: str) -> int:
        if name not in self.symbols:
            self.symbols[name] = len(self.symbols)
        return self.symbols[name]


class _Emitter:
    def __init__(self, ctx: RuleContext):
        self.ctx = ctx
        self.code: list[list[int]] = []
        self.consts: list[float] = []
        self.subs: list[tuple[int, int, int]] = []
        self.streams: list[int] = []
        self._stream_index: dict[str, int] = {}

    def emit(self, op: int, a: int = 0, b: int = 0) -> int:
        self.code.append([op, a, b])
        return len(self.code) - 1

    def patch(self, at: int, a: int) -> None:
        self.code[at][1] = a

    def const(self, value: float) -> int:
        # constants are not deduplicated; rules are tiny
        self.consts.append(float(value))
        return len(self.consts) - 1

    def stream(self, name: str) -> int:
        if name not in self._stream_index:
            self._stream_index[name] = len(self.streams)
            self.streams.append(string_key(name))
        return self._stream_index[name]

    # -- scalar expressions --------------------------------------------

    def expr(self, node) -> None:
        if isinstance(node, R.Num):
            self.emit(K.OP_CONST, self.const(node.value))
        elif isinstance(node, R.Bool):
            self.emit(K.OP_CONST, self.const(1.0 if node.value else 0.0))
        elif isinstance(node, R.Sym):
            self.emit(K.OP_CONST, self.const(float(self.ctx.symbol_code(node.name))))
        elif isinstance(node, R.ParamRef):
            self.emit(K.OP_LOAD_PARAM, self.ctx.param_slots[node.name])
        elif isinstance(node, R.SelfField):
            self.emit(K.OP_LOAD_SELF, self.ctx.field_slots[node.name])
        elif isinstance(node, R.OtherField):
            self.emit(K.OP_LOAD_OTHER, self.ctx.field_slots[node.name])
        elif isinstance(node, R.SelfLoc):
            self.emit(K.OP_LOAD_SELF_X if node.axis == 0 else K.OP_LOAD_SELF_Y)
        elif isinstance(node, R.OtherLoc):
            self.emit(K.OP_LOAD_OTHER_X if node.axis == 0 else K.OP_LOAD_OTHER_Y)
        elif isinstance(node, R.Unary):
            self.expr(node.operand)
            self.emit(K.OP_NEG if node.op == "neg" else K.OP_NOT)
        elif isinstance(node, R.Binary):
            self.expr(node.left)
            self.expr(node.right)
            self.emit(_BINOPS[node.op])
        elif isinstance(node, R.IfExpr):
            self.expr(node.cond)
            jif = self.emit(K.OP_JIF)
            self.expr(node.then)
            jend = self.emit(K.OP_JMP)
            self.patch(jif, len(self.code))
            self.expr(node.orelse)
            self.patch(jend, len(self.code))
        elif isinstance(node, R.Aggregate):
            self.aggregate(node)
        elif isinstance(node, R.Random):
            self.emit(K.OP_RANDOM, self.stream(node.stream))
        elif isinstance(node, R.Choose):
            for opt in node.options:
                self.expr(opt)
            self.emit(K.OP_CHOOSE, self.stream(node.stream), len(node.options))
        else:
            raise CompileError(f"expression node {type(node).__name__} "
                               "is not available inside step rules")

    def aggregate(self, node: R.Aggregate) -> None:
        if node.domain.kind == "percepts":
            raise CompileError("percept aggregates are not available inside step rules")
        if node.kind in ("min", "max"):
            self.expr(node.default)
        if node.domain.kind == "within":
            self.expr(node.domain.radius)
            dom = K.DOM_WITHIN
        else:
            dom = K.DOM_NEIGHBORS
        agg_op = self.emit(K.OP_AGG, _AGGS[node.kind], 0)
        # sub-program follows the jump target; main tape resumes after it
        jover = self.emit(K.OP_JMP)
        start = len(self.code)
        self.expr(node.where if node.kind in ("count", "fraction") and node.where is not None
                  else node.value if node.kind in ("min", "max")
                  else R.Bool(True))
        self.emit(K.OP_END)
        self.subs.append((dom, start, len(self.code)))
        self.code[agg_op][2] = len(self.subs) - 1
        self.patch(jover, len(self.code))

    # -- movement bodies -------------------------------------------------

    def location(self, node) -> None:
        if isinstance(node, R.LocStay):
            self.emit(K.OP_LOC_STAY)
        elif isinstance(node, R.LocJump):
            self.expr(node.x)
            self.expr(node.y)
            self.emit(K.OP_LOC_JUMP)
        elif isinstance(node, R.LocStep):
            self.expr(node.dx)
            self.expr(node.dy)
            self.emit(K.OP_LOC_STEP)
        elif isinstance(node, R.LocRandomVacant):
            has_radius = node.radius is not None
            if has_radius:
                self.expr(node.radius)
            self.emit(K.OP_LOC_RANDVAC, 1 if has_radius else 0, self.stream(node.stream))
        elif isinstance(node, R.LocIf):
            self.expr(node.cond)
            jif = self.emit(K.OP_JIF)
            self.location(node.then)
            jend = self.emit(K.OP_JMP)
            self.patch(jif, len(self.code))
            self.location(node.orelse)
            self.patch(jend, len(self.code))
        else:
            raise CompileError(f"bad movement node {type(node).__name__}")

    # -- adjacency bodies -------------------------------------------------

    def neighborhood(self, node) -> None:
        if isinstance(node, R.NbrKeep):
            self.emit(K.OP_NBR_KEEP)
        elif isinstance(node, R.NbrNone):
            self.emit(K.OP_NBR_NONE)
        elif isinstance(node, R.NbrWithin):
            self.expr(node.radius)
            self.emit(K.OP_NBR_WITHIN)
        elif isinstance(node, R.NbrIf):
            self.expr(node.cond)
            jif = self.emit(K.OP_JIF)
            self.neighborhood(node.then)
            jend = self.emit(K.OP_JMP)
            self.patch(jif, len(self.code))
            self.neighborhood(node.orelse)
            self.patch(jend, len(self.code))
        else:
            raise CompileError(f"bad adjacency node {type(node).__name__}")

    def finish(self, name: str, kind: str, source) -> CompiledRule:
        self.emit(K.OP_END)
        code = np.array(self.code, dtype=np.int64).reshape(len(self.code), 3)
        consts = np.array(self.consts, dtype=np.float64)
        subs = (np.array(self.subs, dtype=np.int64).reshape(len(self.subs), 3)
                if self.subs else np.zeros((0, 3), dtype=np.int64))
        streams = np.array(self.streams, dtype=np.uint64)
        return CompiledRule(name, kind, code, consts, subs, streams, source)


_BINOPS = {
    "+": K.OP_ADD, "-": K.OP_SUB, "*": K.OP_MUL, "/": K.OP_DIV, "%": K.OP_MOD,
    "<": K.OP_LT, "<=": K.OP_LE, ">": K.OP_GT, ">=": K.OP_GE,
    "==": K.OP_EQ, "!=": K.OP_NE, "and": K.OP_AND, "or": K.OP_OR,
}

_AGGS = {"count": K.AGG_COUNT, "fraction": K.AGG_FRACTION,
         "min": K.AGG_MIN, "max": K.AGG_MAX}


def compile_rule(rule, ctx: RuleContext) -> CompiledRule:
    """Compile one named rule against a model's interning context."""
    em = _Emitter(ctx)
    if isinstance(rule, R.TransitionRule):
        for fname, expr in rule.assigns:
            em.expr(expr)
            em.emit(K.OP_STORE, ctx.field_slots[fname])
        return em.finish(rule.name, "transition", rule)
    if isinstance(rule, R.MovementRule):
        em.location(rule.body)
        return em.finish(rule.name, "movement", rule)
    if isinstance(rule, R.AdjacencyRule):
        em.neighborhood(rule.body)
        return em.finish(rule.name, "adjacency", rule)
    raise CompileError(f"rule {rule!r} cannot run in the step kernel")
