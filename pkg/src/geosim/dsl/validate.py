"""Scenario validation: name resolution, type checking, completeness.

Validation never raises; it returns a report whose entries carry a
severity. Compilation requires an error-free report.
"""

from __future__ import annotations

from dataclasses import dataclass

from geosim.dsl import doc as D
from geosim.rules import ast as R

ERROR = "error"
WARNING = "warning"
INFO = "info"

# attribute types of the percept element under an aggregate
_PERCEPT_ATTRS = {"kind": "symbol", "distance": "number", "value": "number",
                  "x": "number", "y": "number"}


@dataclass(frozen=True)
class ValidationEntry:
    severity: str
    where: str
    message: str

    def __str__(self):
        return f"{self.severity}: [{self.where}] {self.message}"


class ValidationReport:
    def __init__(self):
        self.entries: list[ValidationEntry] = []

    def add(self, severity: str, where: str, message: str):
        self.entries.append(ValidationEntry(severity, where, message))

    def errors(self):
        return [e for e in self.entries if e.severity == ERROR]

    @property
    def ok(self) -> bool:
        return not self.errors()

    def __str__(self):
        if not self.entries:
            return "clean: no findings\n"
        return "\n".join(str(e) for e in self.entries) + "\n"


def _literal_type(value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, str):
        return "symbol"
    return "number"


class _TypeCtx:
    def __init__(self, report, where, *, fields=None, other_fields=None,
                 params=None, domains=(), allow_belief=False,
                 lattice=True, assign_targets=None):
        self.report = report
        self.where = where
        self.fields = fields or {}
        self.other_fields = other_fields
        self.params = params or {}
        self.domains = set(domains)
        self.allow_belief = allow_belief
        self.lattice = lattice
        self.assign_targets = assign_targets if assign_targets is not None else self.fields
        self.in_aggregate = False

    def error(self, message):
        self.report.add(ERROR, self.where, message)

    def expect(self, node, want: str, what: str):
        got = self.infer(node)
        if got is not None and got != want:
            self.error(f"{what} must be {want}, got {got}")
        return got

    # -- inference ------------------------------------------------------

    def infer(self, node) -> str | None:
        if isinstance(node, R.Num):
            return "number"
        if isinstance(node, R.Bool):
            return "bool"
        if isinstance(node, R.Sym):
            return "symbol"
        if isinstance(node, R.ParamRef):
            if node.name not in self.params:
                self.error(f"undeclared parameter {node.name!r}")
                return None
            return self.params[node.name]
        if isinstance(node, R.SelfField):
            if node.name not in self.fields:
                self.error(f"undeclared field self.{node.name}")
                return None
            return self.fields[node.name]
        if isinstance(node, R.OtherField):
            if not self.in_aggregate:
                self.error("'other' is only valid inside an aggregate")
                return None
            if self.other_fields is None or node.name not in self.other_fields:
                self.error(f"aggregate elements have no field {node.name!r}")
                return None
            return self.other_fields[node.name]
        if isinstance(node, (R.SelfLoc, R.OtherLoc)):
            if isinstance(node, R.OtherLoc) and not self.in_aggregate:
                self.error("'other' is only valid inside an aggregate")
                return None
            return "number"
        if isinstance(node, R.BeliefRef):
            if not self.allow_belief:
                self.error("belief() is not available in step rules")
                return None
            return self.infer(node.default)
        if isinstance(node, R.Unary):
            if node.op == "not":
                self.expect(node.operand, "bool", "operand of 'not'")
                return "bool"
            self.expect(node.operand, "number", "negated value")
            return "number"
        if isinstance(node, R.Binary):
            return self._binary(node)
        if isinstance(node, R.IfExpr):
            self.expect(node.cond, "bool", "condition")
            t1 = self.infer(node.then)
            t2 = self.infer(node.orelse)
            if t1 is not None and t2 is not None and t1 != t2:
                self.error(f"branches disagree: {t1} vs {t2}")
                return None
            return t1 or t2
        if isinstance(node, R.Aggregate):
            return self._aggregate(node)
        if isinstance(node, R.Random):
            if self.in_aggregate:
                self.error("random() cannot be drawn inside an aggregate")
                return None
            return "number"
        if isinstance(node, R.Choose):
            if self.in_aggregate:
                self.error("choose() cannot be drawn inside an aggregate")
                return None
            types = [self.infer(o) for o in node.options]
            known = {t for t in types if t is not None}
            if len(known) > 1:
                self.error(f"choose() options disagree: {sorted(known)}")
                return None
            return known.pop() if known else None
        self.error(f"unexpected expression node {type(node).__name__}")
        return None

    def _binary(self, node) -> str | None:
        op = node.op
        if op in ("and", "or"):
            self.expect(node.left, "bool", f"left side of {op!r}")
            self.expect(node.right, "bool", f"right side of {op!r}")
            return "bool"
        if op in ("==", "!="):
            t1 = self.infer(node.left)
            t2 = self.infer(node.right)
            if t1 is not None and t2 is not None and t1 != t2:
                self.error(f"comparing {t1} with {t2}")
            return "bool"
        if op in ("<", "<=", ">", ">="):
            self.expect(node.left, "number", f"left side of {op!r}")
            self.expect(node.right, "number", f"right side of {op!r}")
            return "bool"
        self.expect(node.left, "number", f"left side of {op!r}")
        self.expect(node.right, "number", f"right side of {op!r}")
        return "number"

    def _aggregate(self, node: R.Aggregate) -> str | None:
        if self.in_aggregate:
            self.error("aggregates cannot nest")
            return None
        if node.domain.kind not in self.domains:
            self.error(f"domain {node.domain.kind!r} is not available here")
            return None
        if node.domain.kind == "within":
            self.expect(node.domain.radius, "number", "within() radius")
        self.in_aggregate = True
        if node.kind in ("count", "fraction"):
            if node.where is not None:
                self.expect(node.where, "bool", f"{node.kind}() predicate")
            elif node.kind == "fraction":
                self.error("fraction() requires a where predicate")
        else:
            self.expect(node.value, "number", f"{node.kind}() value")
            self.in_aggregate = False
            self.expect(node.default, "number", f"{node.kind}() default")
            self.in_aggregate = True
        self.in_aggregate = False
        return "number"

    # -- movement / neighborhood bodies ----------------------------------

    def check_loc(self, node):
        if isinstance(node, R.LocStay):
            return
        if isinstance(node, R.LocJump):
            self.expect(node.x, "number", "jump() x")
            self.expect(node.y, "number", "jump() y")
            return
        if isinstance(node, R.LocStep):
            self.expect(node.dx, "number", "step() dx")
            self.expect(node.dy, "number", "step() dy")
            return
        if isinstance(node, R.LocRandomVacant):
            if not self.lattice:
                self.error("random_vacant() requires a lattice georeference")
            if node.radius is not None:
                self.expect(node.radius, "number", "random_vacant() radius")
            return
        if isinstance(node, R.LocIf):
            self.expect(node.cond, "bool", "condition")
            self.check_loc(node.then)
            self.check_loc(node.orelse)
            return
        self.error(f"bad movement node {type(node).__name__}")

    def check_nbr(self, node):
        if isinstance(node, (R.NbrKeep, R.NbrNone)):
            return
        if isinstance(node, R.NbrWithin):
            self.expect(node.radius, "number", "within() radius")
            return
        if isinstance(node, R.NbrIf):
            self.expect(node.cond, "bool", "condition")
            self.check_nbr(node.then)
            self.check_nbr(node.orelse)
            return
        self.error(f"bad neighborhood node {type(node).__name__}")

    def check_assigns(self, assigns, what):
        for fname, expr in assigns:
            if fname not in self.assign_targets:
                self.error(f"{what} assigns undeclared field {fname!r}")
                continue
            want = self.assign_targets[fname]
            got = self.infer(expr)
            if got is not None and got != want:
                self.error(f"{what} assigns {got} to {want} field {fname!r}")


def _unique(report, items, what, key=lambda x: x):
    seen = {}
    for item in items:
        k = key(item)
        if k in seen:
            report.add(ERROR, what, f"duplicate {what} {k!r}")
        seen[k] = item
    return seen


def validate(doc: D.ScenarioDoc) -> ValidationReport:
    report = ValidationReport()
    rules = _unique(report, doc.rules, "rule", key=lambda r: r.name)
    automata = _unique(report, doc.automata, "automaton type", key=lambda a: a.name)
    agents = _unique(report, doc.agents, "agent type", key=lambda a: a.name)
    objects = _unique(report, doc.objects, "object type", key=lambda o: o.name)
    layers = _unique(report, doc.layers, "layer", key=lambda l: l.name)
    for name in set(automata) & (set(agents) | set(objects)):
        report.add(ERROR, name, "type name used for both automata and entities")

    env_params = {}
    for pname, value in doc.env.params:
        if pname in env_params:
            report.add(ERROR, "env", f"duplicate parameter {pname!r}")
        env_params[pname] = _literal_type(value)
    all_params = dict(env_params)
    for layer in doc.layers:
        for pname, value in layer.params:
            t = _literal_type(value)
            if pname in all_params and all_params[pname] != t:
                report.add(ERROR, layer.name,
                           f"parameter {pname!r} redeclared with another type")
            all_params[pname] = t

    lattice = doc.georef is None or doc.georef.kind == "lattice"

    # shared field table across automaton types (kernel slots are shared)
    auto_fields: dict[str, str] = {}
    for a in doc.automata:
        for fd in a.fields:
            if fd.name in ("x", "y"):
                report.add(ERROR, a.name, "state fields may not be named 'x' or 'y'")
            if fd.name in auto_fields and auto_fields[fd.name] != fd.type:
                report.add(ERROR, a.name,
                           f"field {fd.name!r} conflicts with another "
                           f"automaton's declaration")
            auto_fields[fd.name] = fd.type

    def gas_ctx(where, own_fields, targets=None):
        return _TypeCtx(report, where, fields=own_fields,
                        other_fields=auto_fields, params=env_params,
                        domains=("neighbors", "within"), lattice=lattice,
                        assign_targets=targets)

    used_rules = set()

    def resolve(ref, want_kind, where):
        used_rules.add(ref)
        rule = rules.get(ref)
        if rule is None:
            report.add(ERROR, where, f"undeclared rule {ref!r}")
            return None
        if rule.kind != want_kind:
            report.add(ERROR, where,
                       f"rule {ref!r} is a {rule.kind} rule, expected {want_kind}")
            return None
        return rule

    # -- automaton types -----------------------------------------------

    for a in doc.automata:
        own = {fd.name: fd.type for fd in a.fields}
        _unique(report, a.fields, f"{a.name} field", key=lambda f: f.name)
        if a.transition is None:
            report.add(ERROR, a.name, "no transition rule declared")
        else:
            rule = resolve(a.transition, "transition", a.name)
            if rule is not None:
                gas_ctx(f"{a.name}/{rule.name}", own, own).check_assigns(
                    rule.assigns, "transition")
        if a.movement is None:
            report.add(INFO, a.name, "movement defaulted to identity")
        else:
            rule = resolve(a.movement, "movement", a.name)
            if rule is not None:
                gas_ctx(f"{a.name}/{rule.name}", own).check_loc(rule.body)
        if a.adjacency is None:
            report.add(INFO, a.name, "neighborhood rule defaulted to identity")
        else:
            rule = resolve(a.adjacency, "adjacency", a.name)
            if rule is not None:
                gas_ctx(f"{a.name}/{rule.name}", own).check_nbr(rule.body)

    # -- agent types ------------------------------------------------------

    for a in doc.agents:
        own = {fd.name: fd.type for fd in a.fields}
        _unique(report, a.fields, f"{a.name} field", key=lambda f: f.name)
        actions = _unique(report, a.actions, f"{a.name} action",
                          key=lambda act: act.name)
        goals = _unique(report, a.goals, f"{a.name} goal", key=lambda g: g.name)

        def agent_ctx(where, percepts=True):
            return _TypeCtx(report, where, fields=own,
                            other_fields=_PERCEPT_ATTRS if percepts else None,
                            params=all_params,
                            domains=("percepts",) if percepts else (),
                            allow_belief=True, lattice=lattice,
                            assign_targets=own)

        for act in a.actions:
            ctx = agent_ctx(f"{a.name}/{act.name}")
            ctx.expect(act.precondition, "bool", "action precondition")
            ctx.check_assigns(act.effects, f"action {act.name!r}")
            if act.move is not None:
                ctx.check_loc(act.move)

        for ref in a.perceive:
            rule = resolve(ref, "perception", a.name)
            if rule is not None and rule.sense == "within":
                ctx = agent_ctx(f"{a.name}/{rule.name}")
                ctx.expect(rule.radius, "number", "perception radius")
                if rule.where is not None:
                    ctx.in_aggregate = True
                    ctx.expect(rule.where, "bool", "perception filter")
                    ctx.in_aggregate = False
            if rule is not None and rule.sense == "param":
                if rule.param not in all_params:
                    report.add(ERROR, f"{a.name}/{rule.name}",
                               f"senses undeclared parameter {rule.param!r}")
        for ref in a.decide:
            rule = resolve(ref, "decision", a.name)
            if rule is None:
                continue
            agent_ctx(f"{a.name}/{rule.name}").expect(
                rule.when, "bool", "decision condition")
            if rule.action not in actions:
                report.add(ERROR, f"{a.name}/{rule.name}",
                           f"ability names unknown action {rule.action!r}")
        for ref in a.agree:
            rule = resolve(ref, "agreement", a.name)
            if rule is None:
                continue
            spec = actions.get(rule.action)
            if spec is None:
                report.add(ERROR, f"{a.name}/{rule.name}",
                           f"pairs unknown action {rule.action!r}")
            elif not spec.joint:
                report.add(ERROR, f"{a.name}/{rule.name}",
                           f"pairs action {rule.action!r} which is not joint")

        for g in a.goals:
            agent_ctx(f"{a.name}/goal {g.name}").expect(
                g.condition, "bool", "goal condition")
        for gname, _utility in a.prefers:
            if gname not in goals:
                report.add(ERROR, a.name,
                           f"preference for undeclared goal {gname!r}")
        for gname, steps in a.plans:
            if gname not in goals:
                report.add(ERROR, a.name, f"plan for undeclared goal {gname!r}")
            for s in steps:
                if s not in actions:
                    report.add(ERROR, a.name,
                               f"plan step {s!r} is not a declared action")
        for role in a.roles:
            for gname in role.goals:
                if gname not in goals:
                    report.add(ERROR, a.name,
                               f"role {role.name!r} names undeclared goal "
                               f"{gname!r}")
        if a.mind is not None and a.mind.kind == "rule_based" and not a.plans:
            report.add(WARNING, a.name,
                       "rule_based mind with no plan productions")

        if a.possibilistic is not None:
            pb = a.possibilistic
            worlds = set(pb.worlds)
            pi = dict(pb.pi)
            for w in pi:
                if w not in worlds:
                    report.add(ERROR, a.name, f"pi for undeclared world {w!r}")
            missing = worlds - set(pi)
            if missing:
                report.add(ERROR, a.name,
                           f"worlds without a possibility value: {sorted(missing)}")
            if pi and max(pi.values()) != 1.0:
                report.add(ERROR, a.name,
                           "possibility distribution must have max 1")
            for goal, guard, holds in pb.desires:
                if goal not in goals:
                    report.add(ERROR, a.name,
                               f"desire for undeclared goal {goal!r}")
                for w in holds:
                    if w not in worlds:
                        report.add(ERROR, a.name,
                                   f"desire holds in undeclared world {w!r}")
                agent_ctx(f"{a.name}/desire {goal}").expect(
                    guard, "bool", "desire guard")

    # -- env and layer functions ---------------------------------------

    env_ctx = _TypeCtx(report, "env", params=env_params,
                       assign_targets=env_params)
    for fn in doc.env.functions:
        env_ctx.where = f"env/{fn.name}"
        env_ctx.check_assigns(fn.assigns, f"function {fn.name!r}")
    for layer in doc.layers:
        merged = dict(env_params)
        for pname, value in layer.params:
            merged[pname] = _literal_type(value)
        ctx = _TypeCtx(report, layer.name, params=merged, assign_targets=merged)
        for fn in layer.functions:
            ctx.where = f"{layer.name}/{fn.name}"
            ctx.check_assigns(fn.assigns, f"function {fn.name!r}")

    # -- placement -------------------------------------------------------

    lattice_cells = (doc.georef.width * doc.georef.height
                     if doc.georef is not None and doc.georef.kind == "lattice"
                     else None)
    placed_automata = 0
    for p in doc.places:
        is_automaton = p.type_name in automata
        is_entity = p.type_name in agents or p.type_name in objects
        if not is_automaton and not is_entity:
            report.add(ERROR, "place", f"unknown type {p.type_name!r}")
            continue
        if is_automaton:
            if p.layer is not None:
                report.add(WARNING, "place",
                           f"layer ignored for automaton type {p.type_name!r}")
            if p.count is not None:
                placed_automata += p.count
        else:
            if p.layer is not None and p.layer not in layers:
                report.add(ERROR, "place", f"unknown layer {p.layer!r}")
            if p.layer is None and not doc.layers:
                report.add(ERROR, "place",
                           f"no layer exists to place {p.type_name!r} on")
        if p.at is not None and doc.georef is not None:
            if not doc.georef.contains(p.at):
                report.add(ERROR, "place",
                           f"location {p.at} outside the georeference")
        if p.at is not None and doc.georef is not None \
                and doc.georef.kind == "lattice":
            if p.at[0] != int(p.at[0]) or p.at[1] != int(p.at[1]):
                report.add(ERROR, "place",
                           "lattice placement requires integer coordinates")
        block = (automata.get(p.type_name) or agents.get(p.type_name)
                 or objects.get(p.type_name))
        targets = {fd.name: fd.type for fd in block.fields}
        pctx = _TypeCtx(report, f"place {p.type_name}", params=all_params,
                        fields=targets, assign_targets=targets)
        pctx.check_assigns(p.assigns, "placement")
    if lattice_cells is not None and placed_automata > lattice_cells:
        report.add(ERROR, "place",
                   f"{placed_automata} automata exceed {lattice_cells} cells")
    if doc.places and doc.georef is None:
        report.add(WARNING, "georef",
                   "no georef declared; defaulting to lattice 10 10 clamp")

    for name, rule in rules.items():
        if name not in used_rules:
            report.add(WARNING, "rule", f"rule {name!r} is never referenced")

    return report
