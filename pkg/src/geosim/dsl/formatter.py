"""Canonical scenario printer.

format(parse(format(doc))) == format(doc), and reparsing formatted text
reproduces the document structurally. Comments are not preserved; block
groups print in a fixed order.
"""

from __future__ import annotations

import re

from geosim.dsl import doc as D
from geosim.dsl.lexer import quote
from geosim.rules import ast as R

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# printer precedence levels; children below their context get parens
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_CMP = 4
_PREC_ADD = 5
_PREC_MUL = 6
_PREC_UNARY = 7
_PREC_ATOM = 8

_BIN_PREC = {"or": _PREC_OR, "and": _PREC_AND,
             "==": _PREC_CMP, "!=": _PREC_CMP, "<": _PREC_CMP,
             "<=": _PREC_CMP, ">": _PREC_CMP, ">=": _PREC_CMP,
             "+": _PREC_ADD, "-": _PREC_ADD,
             "*": _PREC_MUL, "/": _PREC_MUL, "%": _PREC_MUL}


def number(v: float) -> str:
    f = float(v)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def literal(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v if _IDENT.match(v) else quote(v)
    return number(v)


def expr(node, prec: int = 0) -> str:
    if isinstance(node, R.Num):
        return number(node.value)
    if isinstance(node, R.Bool):
        return "true" if node.value else "false"
    if isinstance(node, R.Sym):
        return quote(node.name)
    if isinstance(node, R.ParamRef):
        return node.name
    if isinstance(node, R.SelfField):
        return f"self.{node.name}"
    if isinstance(node, R.OtherField):
        return f"other.{node.name}"
    if isinstance(node, R.SelfLoc):
        return "self.x" if node.axis == 0 else "self.y"
    if isinstance(node, R.OtherLoc):
        return "other.x" if node.axis == 0 else "other.y"
    if isinstance(node, R.BeliefRef):
        return f"belief({node.name}, {expr(node.default)})"
    if isinstance(node, R.Random):
        return f"random({node.stream})"
    if isinstance(node, R.Choose):
        opts = ", ".join(expr(o) for o in node.options)
        return f"choose({node.stream}; {opts})"
    if isinstance(node, R.Unary):
        if node.op == "not":
            body = f"not {expr(node.operand, _PREC_NOT)}"
            return body if prec <= _PREC_NOT else f"({body})"
        return f"-{expr(node.operand, _PREC_UNARY)}"
    if isinstance(node, R.Binary):
        p = _BIN_PREC[node.op]
        left = expr(node.left, p)
        right = expr(node.right, p + 1)
        body = f"{left} {node.op} {right}"
        return body if prec <= p else f"({body})"
    if isinstance(node, R.IfExpr):
        body = (f"if {expr(node.cond)} then {expr(node.then)} "
                f"else {expr(node.orelse)}")
        return body if prec == 0 else f"({body})"
    if isinstance(node, R.Aggregate):
        return _aggregate(node)
    raise TypeError(f"cannot print expression node {type(node).__name__}")


def _domain(d: R.Domain) -> str:
    if d.kind == "within":
        return f"within({expr(d.radius)})"
    return d.kind


def _aggregate(node: R.Aggregate) -> str:
    if node.kind in ("count", "fraction"):
        if node.where is None:
            return f"{node.kind}({_domain(node.domain)})"
        return f"{node.kind}({_domain(node.domain)} where {expr(node.where)})"
    return (f"{node.kind}({_domain(node.domain)}, {expr(node.value)}, "
            f"{expr(node.default)})")


def loc_expr(node) -> str:
    if isinstance(node, R.LocStay):
        return "stay"
    if isinstance(node, R.LocJump):
        return f"jump({expr(node.x)}, {expr(node.y)})"
    if isinstance(node, R.LocStep):
        return f"step({expr(node.dx)}, {expr(node.dy)})"
    if isinstance(node, R.LocRandomVacant):
        if node.radius is None:
            return f"random_vacant({node.stream})"
        return f"random_vacant({expr(node.radius)}, {node.stream})"
    if isinstance(node, R.LocIf):
        return (f"if {expr(node.cond)} then {loc_expr(node.then)} "
                f"else {loc_expr(node.orelse)}")
    raise TypeError(f"cannot print movement node {type(node).__name__}")


def nbr_expr(node) -> str:
    if isinstance(node, R.NbrKeep):
        return "keep"
    if isinstance(node, R.NbrNone):
        return "none"
    if isinstance(node, R.NbrWithin):
        return f"within({expr(node.radius)})"
    if isinstance(node, R.NbrIf):
        return (f"if {expr(node.cond)} then {nbr_expr(node.then)} "
                f"else {nbr_expr(node.orelse)}")
    raise TypeError(f"cannot print neighborhood node {type(node).__name__}")


def _shape(s: tuple) -> str:
    if s[0] == "point":
        return "point"
    if s[0] == "disc":
        return f"disc {number(s[1])}"
    return f"box {number(s[1])} {number(s[2])}"


class _Writer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def line(self, text: str = ""):
        self.lines.append("  " * self.depth + text if text else "")

    def open(self, header: str):
        self.line(header + " {")
        self.depth += 1

    def close(self):
        self.depth -= 1
        self.line("}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _env_items(w: _Writer, params, functions):
    for name, value in params:
        w.line(f"param {name} = {literal(value)}")
    for fn in functions:
        w.open(f"function {fn.name}")
        for pname, e in fn.assigns:
            w.line(f"{pname} := {expr(e)}")
        w.close()


def _rule(w: _Writer, rule):
    if isinstance(rule, R.TransitionRule):
        w.open(f"rule {rule.name} transition")
        for fname, e in rule.assigns:
            w.line(f"{fname} := {expr(e)}")
        w.close()
    elif isinstance(rule, R.MovementRule):
        w.open(f"rule {rule.name} movement")
        w.line(loc_expr(rule.body))
        w.close()
    elif isinstance(rule, R.AdjacencyRule):
        w.open(f"rule {rule.name} neighborhood")
        w.line(nbr_expr(rule.body))
        w.close()
    elif isinstance(rule, R.PerceptionRule):
        w.open(f"rule {rule.name} perception")
        if rule.sense == "param":
            w.line(f"sense param {rule.param}")
        elif rule.where is None:
            w.line(f"sense within {expr(rule.radius)}")
        else:
            w.line(f"sense within {expr(rule.radius)} where {expr(rule.where)}")
        w.close()
    elif isinstance(rule, R.DecisionRule):
        w.open(f"rule {rule.name} decision")
        w.line(f"when {expr(rule.when)} do {rule.action}")
        w.close()
    elif isinstance(rule, R.AgreementRule):
        w.open(f"rule {rule.name} agreement")
        w.line(f"pair {rule.action}")
        w.close()
    else:
        raise TypeError(f"cannot print rule {type(rule).__name__}")


def _field(w: _Writer, fd):
    w.line(f"state {fd.name} : {fd.type} = {literal(fd.default)}")


def format_doc(doc: D.ScenarioDoc) -> str:
    """Render a document to canonical text."""
    w = _Writer()
    if doc.env.params or doc.env.functions:
        w.open("env")
        _env_items(w, doc.env.params, doc.env.functions)
        w.close()
    if doc.georef is not None:
        g = doc.georef
        if g.kind == "lattice":
            w.line(f"georef lattice {g.width} {g.height} {g.boundary}")
        else:
            x0, y0, x1, y1 = g.box
            w.line(f"georef continuous {number(x0)} {number(y0)} "
                   f"{number(x1)} {number(y1)} {g.boundary}")
    for layer in doc.layers:
        w.open(f"layer {layer.name}")
        _env_items(w, layer.params, layer.functions)
        w.close()
    for rule in doc.rules:
        _rule(w, rule)
    for a in doc.automata:
        w.open(f"automaton {a.name}")
        for fd in a.fields:
            _field(w, fd)
        w.line(f"neighborhood {a.spec.metric} {number(a.spec.radius)}")
        for slot in ("transition", "movement", "adjacency"):
            ref = getattr(a, slot)
            if ref is not None:
                w.line(f"{slot} {ref}")
        w.close()
    for o in doc.objects:
        w.open(f"object {o.name}")
        for fd in o.fields:
            _field(w, fd)
        w.close()
    for a in doc.agents:
        _agent(w, a)
    for p in doc.places:
        _place(w, p)
    w.open("run")
    w.line(f"seed {p_int(doc.run.seed)}")
    w.line(f"ticks {p_int(doc.run.ticks)}")
    w.line(f"stride {p_int(doc.run.stride)}")
    w.line(f"output {doc.run.output}")
    if doc.run.dump_agents:
        w.line("dump agents")
    w.close()
    return w.text()


def p_int(v: int) -> str:
    return str(int(v))


def _agent(w: _Writer, a: D.AgentBlock):
    w.open(f"agent {a.name}")
    for fd in a.fields:
        _field(w, fd)
    w.line("shapes " + ", ".join(_shape(s) for s in a.shapes))
    for act in a.actions:
        w.open(f"action {act.name}" + (" joint" if act.joint else ""))
        w.line(f"pre {expr(act.precondition)}")
        for fname, e in act.effects:
            w.line(f"{fname} := {expr(e)}")
        if act.move is not None:
            w.line(f"move {loc_expr(act.move)}")
        w.close()
    for name in a.perceive:
        w.line(f"perceive {name}")
    for name in a.decide:
        w.line(f"decide {name}")
    for name in a.agree:
        w.line(f"agree {name}")
    for g in a.goals:
        w.line(f"goal {g.name} {g.kind} {expr(g.condition)}")
    for gname, utility in a.prefers:
        w.line(f"prefer {gname} = {number(utility)}")
    if a.intentions is not None:
        w.line(f"intentions {p_int(a.intentions)}")
    for gname, steps in a.plans:
        w.line(f"plan for {gname} : " + ", ".join(steps))
    if a.mind is not None:
        if a.mind.kind == "rule_based":
            w.line("mind rule_based")
        elif a.mind.kind == "scripted":
            w.line(f"mind scripted {quote(a.mind.target)}")
        else:
            w.line(f"mind external {a.mind.transport} {quote(a.mind.target)}")
    for r in a.roles:
        parts = [f"role {r.name}"]
        if r.goals:
            parts.append("goals " + ", ".join(r.goals))
        if r.description:
            parts.append(quote(r.description))
        w.line(" ".join(parts))
    for uc in a.use_cases:
        w.line(f"use_case {quote(uc)}")
    if a.possibilistic is not None:
        pb = a.possibilistic
        w.open("possibilistic")
        if pb.worlds:
            w.line("world " + ", ".join(pb.worlds))
        for world, value in pb.pi:
            w.line(f"pi {world} = {number(value)}")
        for goal, guard, holds in pb.desires:
            w.line(f"desire {goal} when {expr(guard)} holds " + ", ".join(holds))
        w.close()
    w.close()


def _place(w: _Writer, p: D.PlaceStmt):
    head = f"place {p.type_name}"
    if p.at is not None:
        head += f" at {number(p.at[0])} {number(p.at[1])}"
    else:
        head += f" {p_int(p.count)}"
    if p.layer is not None:
        head += f" on {p.layer}"
    if p.assigns:
        w.open(head)
        for fname, e in p.assigns:
            w.line(f"{fname} := {expr(e)}")
        w.close()
    else:
        w.line(head)
