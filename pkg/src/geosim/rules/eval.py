"""Tree-walking evaluator for agent-side rule expressions.

Step rules run compiled on the kernel backends; everything evaluated
against an agent's own context (decision conditions, goal conditions,
action preconditions and effects, environment functions) walks the tree
here, over native Python values: float, bool, str-symbols.
"""

from __future__ import annotations

import math

from geosim.errors import RuleEvalError
from geosim.rng import SeededRng, Stream
from geosim.rules import ast as R


class EvalContext:
    """Everything an agent-side expression may reference."""

    def __init__(self, *, params=None, self_state=None, beliefs=None,
                 percepts=None, rng: SeededRng | None = None,
                 subject: int = 0, tick: int = 0, rule_name: str = "<expr>"):
        self.params = params or {}
        self.self_state = self_state or {}
        self.beliefs = beliefs or {}
        self.percepts = percepts if percepts is not None else []
        self.rng = rng
        self.subject = subject
        self.tick = tick
        self.rule_name = rule_name
        self._streams: dict[str, Stream] = {}

    def fail(self, message: str):
        raise RuleEvalError(self.rule_name, self.subject, message)

    def stream(self, name: str) -> Stream:
        if self.rng is None:
            self.fail("rule draws randomness but no rng was supplied")
        if name not in self._streams:
            self._streams[name] = self.rng.stream(self.subject, self.tick, name)
        return self._streams[name]


def _percept_attr(percept, name, ctx):
    if name == "kind":
        return percept.key
    if name == "distance":
        return float(percept.distance or 0.0)
    if name == "value":
        v = percept.value
        return float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v
    if name == "x":
        return float(percept.location[0]) if percept.location else 0.0
    if name == "y":
        return float(percept.location[1]) if percept.location else 0.0
    ctx.fail(f"percepts have no attribute {name!r}")


def evaluate(node, ctx: EvalContext, other=None):
    if isinstance(node, R.Num):
        return node.value
    if isinstance(node, R.Bool):
        return node.value
    if isinstance(node, R.Sym):
        return node.name
    if isinstance(node, R.ParamRef):
        if node.name not in ctx.params:
            ctx.fail(f"unbound parameter {node.name!r}")
        return ctx.params[node.name]
    if isinstance(node, R.SelfField):
        if node.name not in ctx.self_state:
            ctx.fail(f"unbound field {node.name!r}")
        return ctx.self_state[node.name]
    if isinstance(node, R.OtherField):
        if other is None:
            ctx.fail("'other' is only available inside an aggregate")
        return _percept_attr(other, node.name, ctx)
    if isinstance(node, R.BeliefRef):
        entry = ctx.beliefs.get(node.name)
        if entry is None:
            return evaluate(node.default, ctx, other)
        return entry[0]
    if isinstance(node, R.Unary):
        v = evaluate(node.operand, ctx, other)
        return -v if node.op == "neg" else (not v)
    if isinstance(node, R.Binary):
        return _binary(node, ctx, other)
    if isinstance(node, R.IfExpr):
        branch = node.then if evaluate(node.cond, ctx, other) else node.orelse
        return evaluate(branch, ctx, other)
    if isinstance(node, R.Aggregate):
        return _aggregate(node, ctx)
    if isinstance(node, R.Random):
        return ctx.stream(node.stream).uniform()
    if isinstance(node, R.Choose):
        values = [evaluate(opt, ctx, other) for opt in node.options]
        u = ctx.stream(node.stream).uniform()
        return values[int(u * len(values))]
    ctx.fail(f"node {type(node).__name__} cannot appear in an agent rule")


def _binary(node, ctx, other):
    op = node.op
    if op == "and":
        return bool(evaluate(node.left, ctx, other)) and bool(evaluate(node.right, ctx, other))
    if op == "or":
        return bool(evaluate(node.left, ctx, other)) or bool(evaluate(node.right, ctx, other))
    a = evaluate(node.left, ctx, other)
    b = evaluate(node.right, ctx, other)
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                ctx.fail("division by zero")
            return a / b
        if op == "%":
            if b == 0:
                ctx.fail("division by zero")
            return math.fmod(a, b)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
    except TypeError:
        ctx.fail(f"operator {op!r} applied to {type(a).__name__} and {type(b).__name__}")
    ctx.fail(f"unknown operator {op!r}")


def _aggregate(node: R.Aggregate, ctx: EvalContext):
    if node.domain.kind != "percepts":
        ctx.fail("agent rules aggregate over percepts only")
    elements = ctx.percepts
    if node.kind == "count":
        if node.where is None:
            return float(len(elements))
        return float(sum(1 for p in elements if evaluate(node.where, ctx, other=p)))
    if node.kind == "fraction":
        if not elements:
            return 0.0
        hits = sum(1 for p in elements if evaluate(node.where, ctx, other=p))
        return float(hits) / float(len(elements))
    values = [evaluate(node.value, ctx, other=p) for p in elements]
    if not values:
        return evaluate(node.default, ctx)
    return min(values) if node.kind == "min" else max(values)


def holds(node, ctx: EvalContext, other=None) -> bool:
    """Evaluate a condition expression to a boolean."""
    return bool(evaluate(node, ctx, other))
