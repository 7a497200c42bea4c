"""Recursive-descent parser for scenario text.

One pass reports every syntax error it can: a failed statement records a
ParseError and recovery skips to the next line (or block edge), so a
single typo does not hide the rest of the file. A document with any
errors raises ScenarioParseError; there is no partial success.
"""

from __future__ import annotations

from geosim.agentstate.state import ActionSpec
from geosim.dsl import doc as D
from geosim.dsl.lexer import Token, lex, unquote
from geosim.env.model import EnvFunction
from geosim.gas.model import FieldDecl, GeoRefConvention, NeighborhoodSpec
from geosim.rules import ast as R

_METRICS = ("moore", "vonneumann", "euclidean")
_AGG_KEYWORDS = ("count", "fraction", "min", "max")
_RESERVED_EXPR = ("if", "then", "else", "and", "or", "not", "true", "false",
                  "self", "other", "random", "choose", "belief") + _AGG_KEYWORDS


class _Fail(Exception):
    """Internal parse failure; recovery happens at statement level."""


class Parser:
    def __init__(self, source: str):
        self.tokens = lex(source)
        self.pos = 0
        self.errors: list[D.ParseError] = []

    # -- token primitives -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("ident", "op")

    def at_kind(self, kind: str) -> bool:
        return self.peek().kind == kind

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        self.errors.append(D.ParseError(tok.line, tok.column, message, tok.text))
        raise _Fail()

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def expect_ident(self, what: str = "name") -> str:
        if not self.at_kind("ident"):
            self.error(f"expected {what}")
        return self.advance().text

    def expect_number(self) -> float:
        neg = self.accept("-")
        if not self.at_kind("number"):
            self.error("expected a number")
        v = float(self.advance().text)
        return -v if neg else v

    def expect_int(self, what: str = "integer") -> int:
        v = self.expect_number()
        if v != int(v):
            self.error(f"expected an {what}")
        return int(v)

    def expect_string(self) -> str:
        if not self.at_kind("string"):
            self.error("expected a quoted string")
        return unquote(self.advance().text)

    def skip_newlines(self):
        while self.at_kind("newline"):
            self.advance()

    def end_statement(self):
        if self.at_kind("newline"):
            self.advance()
            return
        if self.at("}") or self.at_kind("eof"):
            return
        self.error("unexpected input at end of statement")

    # -- recovery ---------------------------------------------------------

    def sync_line(self):
        while not self.at_kind("eof"):
            if self.at_kind("newline"):
                self.advance()
                return
            if self.at("}"):
                return
            self.advance()

    def sync_block(self):
        depth = 0
        while not self.at_kind("eof"):
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                if depth == 0:
                    self.advance()
                    return
                depth -= 1
            self.advance()

    # -- block scaffolding --------------------------------------------------

    def open_block(self):
        self.expect("{")
        self.skip_newlines()

    def block_items(self, item_fn):
        """Run item_fn per statement until the closing brace."""
        while not self.at("}") and not self.at_kind("eof"):
            try:
                item_fn()
            except _Fail:
                self.sync_line()
            self.skip_newlines()
        if not self.accept("}"):
            self.errors.append(D.ParseError(
                self.peek().line, self.peek().column,
                "unterminated block", self.peek().text))

    # -- literals and expressions ------------------------------------------

    def literal(self):
        if self.at("true"):
            self.advance()
            return True
        if self.at("false"):
            self.advance()
            return False
        if self.at_kind("string"):
            return unquote(self.advance().text)
        if self.at_kind("ident"):
            return self.advance().text  # bare symbol
        return self.expect_number()

    def expr(self):
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return R.IfExpr(cond, then, self.expr())
        return self.or_expr()

    def or_expr(self):
        node = self.and_expr()
        while self.at("or"):
            self.advance()
            node = R.Binary("or", node, self.and_expr())
        return node

    def and_expr(self):
        node = self.not_expr()
        while self.at("and"):
            self.advance()
            node = R.Binary("and", node, self.not_expr())
        return node

    def not_expr(self):
        if self.accept("not"):
            return R.Unary("not", self.not_expr())
        return self.comparison()

    def comparison(self):
        node = self.additive()
        for op in ("==", "!=", "<=", ">=", "<", ">"):
            if self.at(op):
                self.advance()
                return R.Binary(op, node, self.additive())
        return node

    def additive(self):
        node = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            node = R.Binary(op, node, self.multiplicative())
        return node

    def multiplicative(self):
        node = self.unary()
        while self.at("*") or self.at("/") or self.at("%"):
            op = self.advance().text
            node = R.Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, R.Num):
                return R.Num(-operand.value)
            return R.Unary("neg", operand)
        return self.primary()

    def member(self, owner: str):
        self.expect(".")
        name = self.expect_ident("field name")
        if owner == "self":
            if name == "x":
                return R.SelfLoc(0)
            if name == "y":
                return R.SelfLoc(1)
            return R.SelfField(name)
        if name == "x":
            return R.OtherLoc(0)
        if name == "y":
            return R.OtherLoc(1)
        return R.OtherField(name)

    def primary(self):
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return R.Num(float(tok.text))
        if tok.kind == "string":
            self.advance()
            return R.Sym(unquote(tok.text))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if self.accept("true"):
            return R.Bool(True)
        if self.accept("false"):
            return R.Bool(False)
        if self.accept("self"):
            return self.member("self")
        if self.accept("other"):
            return self.member("other")
        if tok.text in _AGG_KEYWORDS and self.peek(1).text == "(":
            return self.aggregate()
        if self.accept("random"):
            self.expect("(")
            stream = self.expect_ident("stream name")
            self.expect(")")
            return R.Random(stream)
        if self.accept("choose"):
            self.expect("(")
            stream = self.expect_ident("stream name")
            self.expect(";")
            options = [self.expr()]
            while self.accept(","):
                options.append(self.expr())
            self.expect(")")
            return R.Choose(stream, tuple(options))
        if self.accept("belief"):
            self.expect("(")
            name = self.expect_ident("belief key")
            self.expect(",")
            default = self.expr()
            self.expect(")")
            return R.BeliefRef(name, default)
        if tok.kind == "ident":
            self.advance()
            return R.ParamRef(tok.text)
        self.error("expected an expression")

    def aggregate(self):
        kind = self.advance().text
        self.expect("(")
        domain = self.domain()
        where = value = default = None
        if kind in ("count", "fraction"):
            if self.accept("where"):
                where = self.expr()
        else:
            self.expect(",")
            value = self.expr()
            self.expect(",")
            default = self.expr()
        self.expect(")")
        return R.Aggregate(kind, domain, where=where, value=value, default=default)

    def domain(self):
        if self.accept("neighbors"):
            return R.Domain("neighbors")
        if self.accept("percepts"):
            return R.Domain("percepts")
        if self.accept("within"):
            self.expect("(")
            radius = self.expr()
            self.expect(")")
            return R.Domain("within", radius)
        self.error("expected a domain: neighbors, percepts, or within(r)")

    def loc_expr(self):
        if self.accept("stay"):
            return R.LocStay()
        if self.accept("jump"):
            self.expect("(")
            x = self.expr()
            self.expect(",")
            y = self.expr()
            self.expect(")")
            return R.LocJump(x, y)
        if self.accept("step"):
            self.expect("(")
            dx = self.expr()
            self.expect(",")
            dy = self.expr()
            self.expect(")")
            return R.LocStep(dx, dy)
        if self.accept("random_vacant"):
            self.expect("(")
            radius = None
            if not (self.at_kind("ident") and self.peek(1).text == ")"):
                radius = self.expr()
                self.expect(",")
            stream = self.expect_ident("stream name")
            self.expect(")")
            return R.LocRandomVacant(radius, stream)
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then = self.loc_expr()
            self.expect("else")
            return R.LocIf(cond, then, self.loc_expr())
        self.error("expected a movement form: stay, jump, step, "
                   "random_vacant, or if/then/else")

    def nbr_expr(self):
        if self.accept("keep"):
            return R.NbrKeep()
        if self.accept("none"):
            return R.NbrNone()
        if self.accept("within"):
            self.expect("(")
            radius = self.expr()
            self.expect(")")
            return R.NbrWithin(radius)
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then = self.nbr_expr()
            self.expect("else")
            return R.NbrIf(cond, then, self.nbr_expr())
        self.error("expected a neighborhood form: keep, none, within, "
                   "or if/then/else")

    # -- statements ---------------------------------------------------------

    def assign(self):
        name = self.expect_ident("field or parameter name")
        self.expect(":=")
        return (name, self.expr())

    def param_decl(self):
        name = self.expect_ident("parameter name")
        self.expect("=")
        value = self.literal()
        self.end_statement()
        return (name, value)

    def function_decl(self):
        name = self.expect_ident("function name")
        assigns = []
        self.open_block()

        def item():
            assigns.append(self.assign())
            self.end_statement()

        self.block_items(item)
        self.end_statement()
        return EnvFunction(name, tuple(assigns))

    def env_block(self):
        params: list = []
        functions: list = []
        self.open_block()

        def item():
            if self.accept("param"):
                params.append(self.param_decl())
            elif self.accept("function"):
                functions.append(self.function_decl())
            else:
                self.error("expected 'param' or 'function'")

        self.block_items(item)
        self.end_statement()
        return D.EnvBlock(tuple(params), tuple(functions))

    def layer_block(self):
        name = self.expect_ident("layer name")
        params: list = []
        functions: list = []
        self.open_block()

        def item():
            if self.accept("param"):
                params.append(self.param_decl())
            elif self.accept("function"):
                functions.append(self.function_decl())
            else:
                self.error("expected 'param' or 'function'")

        self.block_items(item)
        self.end_statement()
        return D.LayerBlock(name, tuple(params), tuple(functions))

    def georef_stmt(self):
        if self.accept("lattice"):
            tok = self.peek()
            width = self.expect_int()
            height = self.expect_int()
            boundary = self.boundary()
            self.end_statement()
            if width <= 0 or height <= 0:
                self.error("lattice dimensions must be positive", tok)
            return GeoRefConvention("lattice", width, height, boundary)
        if self.accept("continuous"):
            tok = self.peek()
            x0 = self.expect_number()
            y0 = self.expect_number()
            x1 = self.expect_number()
            y1 = self.expect_number()
            boundary = self.boundary()
            self.end_statement()
            if not (x1 > x0 and y1 > y0):
                self.error("bounding box is degenerate", tok)
            return GeoRefConvention("continuous", 1, 1, boundary,
                                    box=(x0, y0, x1, y1))
        self.error("expected 'lattice' or 'continuous'")

    def boundary(self) -> str:
        if self.accept("clamp"):
            return "clamp"
        if self.accept("torus"):
            return "torus"
        self.error("expected 'clamp' or 'torus'")

    def single_stmt_block(self, stmt_fn, what: str):
        opening = self.peek()
        results: list = []
        self.open_block()

        def item():
            if results:
                self.error(f"{what} rules hold exactly one statement")
            results.append(stmt_fn())
            self.end_statement()

        self.block_items(item)
        self.end_statement()
        if not results:
            self.errors.append(D.ParseError(
                opening.line, opening.column, f"empty {what} rule body"))
            raise _Fail()
        return results[0]

    def rule_def(self):
        name = self.expect_ident("rule name")
        kind = self.expect_ident("rule kind")
        if kind == "transition":
            assigns = []
            self.open_block()

            def item():
                assigns.append(self.assign())
                self.end_statement()

            self.block_items(item)
            self.end_statement()
            return R.TransitionRule(name, tuple(assigns))
        if kind == "movement":
            return R.MovementRule(name, self.single_stmt_block(
                self.loc_expr, "movement"))
        if kind == "neighborhood":
            return R.AdjacencyRule(name, self.single_stmt_block(
                self.nbr_expr, "neighborhood"))
        if kind == "perception":
            def sense():
                self.expect("sense")
                if self.accept("param"):
                    return R.PerceptionRule(
                        name, "param", param=self.expect_ident("parameter name"))
                self.expect("within")
                radius = self.expr()
                where = self.expr() if self.accept("where") else None
                return R.PerceptionRule(name, "within", radius=radius, where=where)

            return self.single_stmt_block(sense, "perception")
        if kind == "decision":
            def when_do():
                self.expect("when")
                cond = self.expr()
                self.expect("do")
                return R.DecisionRule(name, cond, self.expect_ident("action name"))

            return self.single_stmt_block(when_do, "decision")
        if kind == "agreement":
            def pair():
                self.expect("pair")
                return R.AgreementRule(name, self.expect_ident("action name"))

            return self.single_stmt_block(pair, "agreement")
        self.error(f"unknown rule kind {kind!r}")

    def state_decl(self):
        name = self.expect_ident("field name")
        self.expect(":")
        ftype = self.expect_ident("type")
        if ftype not in ("number", "bool", "symbol"):
            self.error("expected type: number, bool, or symbol")
        default: object
        if self.accept("="):
            default = self.literal()
        else:
            default = {"number": 0.0, "bool": False, "symbol": "none"}[ftype]
        if ftype == "number" and not isinstance(default, (int, float)):
            self.error(f"default for number field {name!r} must be a number")
        if ftype == "bool" and not isinstance(default, bool):
            self.error(f"default for bool field {name!r} must be true or false")
        if ftype == "symbol":
            if isinstance(default, bool) or not isinstance(default, str):
                self.error(f"default for symbol field {name!r} must be a name")
        self.end_statement()
        return FieldDecl(name, ftype, default)

    def automaton_block(self):
        name = self.expect_ident("automaton type name")
        fields: list = []
        spec = NeighborhoodSpec()
        refs = {"transition": None, "movement": None, "adjacency": None}
        self.open_block()

        def item():
            nonlocal spec
            if self.accept("state"):
                fields.append(self.state_decl())
            elif self.accept("neighborhood"):
                metric = self.expect_ident("metric")
                if metric not in _METRICS:
                    self.error("expected metric: moore, vonneumann, or euclidean")
                spec = NeighborhoodSpec(metric, self.expect_number())
                self.end_statement()
            elif self.peek().text in refs and self.peek().kind == "ident":
                slot = self.advance().text
                refs[slot] = self.expect_ident("rule name")
                self.end_statement()
            else:
                self.error("expected state, neighborhood, transition, "
                           "movement, or adjacency")

        self.block_items(item)
        self.end_statement()
        return D.AutomatonBlock(name, tuple(fields), spec,
                                refs["transition"], refs["movement"],
                                refs["adjacency"])

    def object_block(self):
        name = self.expect_ident("object type name")
        fields: list = []
        self.open_block()

        def item():
            self.expect("state")
            fields.append(self.state_decl())

        self.block_items(item)
        self.end_statement()
        return D.ObjectBlock(name, tuple(fields))

    def shape(self):
        if self.accept("point"):
            return ("point",)
        if self.accept("disc"):
            return ("disc", self.expect_number())
        if self.accept("box"):
            return ("box", self.expect_number(), self.expect_number())
        self.error("expected shape: point, disc R, or box W H")

    def action_decl(self):
        name = self.expect_ident("action name")
        joint = self.accept("joint")
        pre = R.Bool(True)
        effects: list = []
        move = None
        self.open_block()

        def item():
            nonlocal pre, move
            if self.accept("pre"):
                pre = self.expr()
                self.end_statement()
            elif self.accept("move"):
                move = self.loc_expr()
                self.end_statement()
            else:
                effects.append(self.assign())
                self.end_statement()

        self.block_items(item)
        self.end_statement()
        return ActionSpec(name, joint, pre, tuple(effects), move)

    def agent_block(self):
        name = self.expect_ident("agent type name")
        fields: list = []
        shapes: list = []
        actions: list = []
        perceive: list = []
        decide: list = []
        agree: list = []
        goals: list = []
        prefers: list = []
        intentions = None
        plans: list = []
        mind = None
        roles: list = []
        use_cases: list = []
        possibilistic = None
        self.open_block()

        def item():
            nonlocal intentions, mind, possibilistic
            if self.accept("state"):
                fields.append(self.state_decl())
            elif self.accept("shapes"):
                shapes.append(self.shape())
                while self.accept(","):
                    shapes.append(self.shape())
                self.end_statement()
            elif self.accept("action"):
                actions.append(self.action_decl())
            elif self.accept("perceive"):
                perceive.append(self.expect_ident("perception rule name"))
                self.end_statement()
            elif self.accept("decide"):
                decide.append(self.expect_ident("decision rule name"))
                self.end_statement()
            elif self.accept("agree"):
                agree.append(self.expect_ident("agreement rule name"))
                self.end_statement()
            elif self.accept("goal"):
                gname = self.expect_ident("goal name")
                gkind = self.expect_ident("goal kind")
                if gkind not in ("maintenance", "achievement"):
                    self.error("expected 'maintenance' or 'achievement'")
                goals.append(D.GoalDecl(gname, gkind, self.expr()))
                self.end_statement()
            elif self.accept("prefer"):
                gname = self.expect_ident("goal name")
                self.expect("=")
                prefers.append((gname, self.expect_number()))
                self.end_statement()
            elif self.accept("intentions"):
                intentions = self.expect_int()
                self.end_statement()
            elif self.accept("plan"):
                self.expect("for")
                gname = self.expect_ident("goal name")
                self.expect(":")
                steps = [self.expect_ident("action name")]
                while self.accept(","):
                    steps.append(self.expect_ident("action name"))
                plans.append((gname, tuple(steps)))
                self.end_statement()
            elif self.accept("mind"):
                mind = self.mind_decl()
            elif self.accept("role"):
                rname = self.expect_ident("role name")
                rgoals: list = []
                rdesc = ""
                if self.accept("goals"):
                    rgoals.append(self.expect_ident("goal name"))
                    while self.accept(","):
                        rgoals.append(self.expect_ident("goal name"))
                if self.at_kind("string"):
                    rdesc = self.expect_string()
                roles.append(D.RoleDecl(rname, tuple(rgoals), rdesc))
                self.end_statement()
            elif self.accept("use_case"):
                use_cases.append(self.expect_string())
                self.end_statement()
            elif self.accept("possibilistic"):
                possibilistic = self.poss_block()
            else:
                self.error("unexpected agent declaration")

        self.block_items(item)
        self.end_statement()
        return D.AgentBlock(
            name, tuple(fields), tuple(shapes) or (("point",),),
            tuple(actions), tuple(perceive), tuple(decide), tuple(agree),
            tuple(goals), tuple(prefers), intentions, tuple(plans), mind,
            tuple(roles), tuple(use_cases), possibilistic)

    def mind_decl(self):
        kind = self.expect_ident("mind kind")
        if kind == "rule_based":
            self.end_statement()
            return D.MindDecl("rule_based")
        if kind == "scripted":
            target = self.expect_string()
            self.end_statement()
            return D.MindDecl("scripted", target=target)
        if kind == "external":
            transport = self.expect_ident("transport")
            if transport not in ("pipe", "http"):
                self.error("expected transport: pipe or http")
            target = self.expect_string()
            self.end_statement()
            return D.MindDecl("external", transport, target)
        self.error("expected mind kind: rule_based, scripted, or external")

    def poss_block(self):
        worlds: list = []
        pi: list = []
        desires: list = []
        self.open_block()

        def item():
            if self.accept("world"):
                worlds.append(self.expect_ident("world name"))
                while self.accept(","):
                    worlds.append(self.expect_ident("world name"))
                self.end_statement()
            elif self.accept("pi"):
                w = self.expect_ident("world name")
                self.expect("=")
                pi.append((w, self.expect_number()))
                self.end_statement()
            elif self.accept("desire"):
                goal = self.expect_ident("goal name")
                self.expect("when")
                guard = self.expr()
                self.expect("holds")
                holds = [self.expect_ident("world name")]
                while self.accept(","):
                    holds.append(self.expect_ident("world name"))
                desires.append((goal, guard, tuple(holds)))
                self.end_statement()
            else:
                self.error("expected world, pi, or desire")

        self.block_items(item)
        self.end_statement()
        return D.PossDecl(tuple(worlds), tuple(pi), tuple(desires))

    def place_stmt(self):
        type_name = self.expect_ident("type name")
        count = None
        at = None
        if self.accept("at"):
            x = self.expect_number()
            y = self.expect_number()
            at = (x, y)
        else:
            count = self.expect_int("entity count")
        layer = None
        if self.accept("on"):
            layer = self.expect_ident("layer name")
        assigns: list = []
        if self.at("{"):
            self.open_block()

            def item():
                assigns.append(self.assign())
                self.end_statement()

            self.block_items(item)
        self.end_statement()
        return D.PlaceStmt(type_name, count, at, layer, tuple(assigns))

    def run_block(self):
        seed = 0
        ticks = 10
        stride = 1
        output = "records"
        dump_agents = False
        self.open_block()

        def item():
            nonlocal seed, ticks, stride, output, dump_agents
            if self.accept("seed"):
                seed = self.expect_int()
            elif self.accept("ticks"):
                ticks = self.expect_int()
                if ticks <= 0:
                    self.error("ticks must be positive")
            elif self.accept("stride"):
                stride = self.expect_int()
                if stride <= 0:
                    self.error("stride must be positive")
            elif self.accept("output"):
                if self.accept("records"):
                    output = "records"
                elif self.accept("table"):
                    output = "table"
                else:
                    self.error("expected output format: records or table")
            elif self.accept("dump"):
                self.expect("agents")
                dump_agents = True
            else:
                self.error("expected seed, ticks, stride, output, or dump")
            self.end_statement()

        self.block_items(item)
        self.end_statement()
        return D.RunBlock(seed, ticks, stride, output, dump_agents)

    # -- document -----------------------------------------------------------

    def document(self) -> D.ScenarioDoc:
        env = D.EnvBlock()
        georef = None
        layers: list = []
        rules: list = []
        automata: list = []
        objects: list = []
        agents: list = []
        places: list = []
        run = None

        self.skip_newlines()
        while not self.at_kind("eof"):
            before = self.pos
            try:
                if self.accept("env"):
                    env = self.env_block()
                elif self.accept("georef"):
                    georef = self.georef_stmt()
                elif self.accept("layer"):
                    layers.append(self.layer_block())
                elif self.accept("rule"):
                    rules.append(self.rule_def())
                elif self.accept("automaton"):
                    automata.append(self.automaton_block())
                elif self.accept("object"):
                    objects.append(self.object_block())
                elif self.accept("agent"):
                    agents.append(self.agent_block())
                elif self.accept("place"):
                    places.append(self.place_stmt())
                elif self.accept("run"):
                    run = self.run_block()
                else:
                    self.error("expected a top-level declaration")
            except _Fail:
                self.sync_line()
                if self.pos == before:
                    self.advance()  # recovery must make progress
            self.skip_newlines()

        if run is None:
            last = self.peek()
            self.errors.append(D.ParseError(last.line, last.column,
                                            "missing run block"))
            run = D.RunBlock()
        return D.ScenarioDoc(env, georef, tuple(layers), tuple(rules),
                             tuple(automata), tuple(objects), tuple(agents),
                             tuple(places), run)


def parse(source: str) -> D.ScenarioDoc:
    """Parse scenario text; raises ScenarioParseError carrying every
    syntax error found in one pass."""
    parser = Parser(source)
    doc = parser.document()
    if parser.errors:
        raise D.ScenarioParseError(parser.errors)
    return doc
