"""Reader for the ``.tanet`` model language.

The grammar is documented in ``docs/grammar.md``.  Parsing happens in two
passes: the text is first read into raw declarations, which are then
elaborated (constants evaluated, templates instantiated, select clauses and
quantifiers expanded, names resolved and type-checked) into a
:class:`~ntacomp.model.ast.Network`.
"""

from __future__ import annotations

import dataclasses
import itertools
import re
import typing as t

from ntacomp.model.ast import (
    Assign,
    ClockAtom,
    Edge,
    Guard,
    Label,
    Network,
    Property,
    TAU_LABEL,
    TimedAutomaton,
)
from ntacomp.model.errors import (
    DuplicateDeclaration,
    ModelError,
    ModelSyntaxError,
    ModelTypeError,
    UnboundName,
)
from ntacomp.model.expr import (
    ARITH_OPS,
    COMPARE_OPS,
    Binary,
    Cond,
    Const,
    Expr,
    Ref,
    Unary,
    conj,
    disj,
    fold,
)
from ntacomp.valuations import Var

KEYWORDS = {
    "const", "int", "bool", "clock", "var", "broadcast", "binary", "chan",
    "automaton", "local", "location", "init", "committed", "inv", "trans",
    "select", "guard", "sync", "do", "urgent", "system", "property", "tau",
    "true", "false", "forall", "exists", "loc", "and", "or", "not", "imply",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<block>/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>->|:=|\.\.|&&|\|\||==|!=|<=|>=|=>|[-+*/%<>!?=(){}\[\],;:.])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclasses.dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> t.List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "nl", "comment", "block"):
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, column))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            column = len(chunk) - chunk.rfind("\n")
        else:
            column += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


# ---------------------------------------------------------------------------
# Raw syntax


@dataclasses.dataclass(frozen=True)
class Pos:
    line: int
    column: int


@dataclasses.dataclass(frozen=True)
class RExpr:
    pos: Pos


@dataclasses.dataclass(frozen=True)
class RLit(RExpr):
    value: t.Union[int, bool]


@dataclasses.dataclass(frozen=True)
class RName(RExpr):
    name: str


@dataclasses.dataclass(frozen=True)
class RIndex(RExpr):
    base: RExpr
    index: RExpr


@dataclasses.dataclass(frozen=True)
class RMember(RExpr):
    base: RExpr
    field: str


@dataclasses.dataclass(frozen=True)
class RLoc(RExpr):
    inst: RExpr


@dataclasses.dataclass(frozen=True)
class RUn(RExpr):
    op: str
    arg: RExpr


@dataclasses.dataclass(frozen=True)
class RBin(RExpr):
    op: str
    left: RExpr
    right: RExpr


@dataclasses.dataclass(frozen=True)
class RCond(RExpr):
    test: RExpr
    then: RExpr
    other: RExpr


@dataclasses.dataclass(frozen=True)
class RQuant(RExpr):
    kind: str
    var: str
    lo: RExpr
    hi: RExpr
    body: RExpr


@dataclasses.dataclass
class RType:
    kind: str  # int | bool | clock
    lo: t.Optional[RExpr] = None
    hi: t.Optional[RExpr] = None


@dataclasses.dataclass
class RVarDecl:
    type: RType
    name: str
    size: t.Optional[RExpr]
    init: t.Union[None, RExpr, t.List[RExpr]]
    pos: Pos


@dataclasses.dataclass
class RConst:
    name: str
    kind: str
    value: RExpr
    pos: Pos


@dataclasses.dataclass
class RChan:
    name: str
    broadcast: bool
    size: t.Optional[RExpr]
    pos: Pos


@dataclasses.dataclass
class RTrans:
    source: str
    target: str
    selects: t.List[t.Tuple[str, RExpr, RExpr]]
    guard: t.Optional[RExpr]
    sync: t.Optional[t.Tuple[str, RExpr]]  # (kind, channel ref)
    updates: t.List[t.Tuple[RExpr, RExpr]]
    urgent: bool
    pos: Pos


@dataclasses.dataclass
class RTemplate:
    name: str
    params: t.List[str]
    locals: t.List[RVarDecl]
    locations: t.List[t.Tuple[str, Pos]]
    initial: t.Optional[t.Tuple[str, Pos]]
    committed: t.List[t.Tuple[str, Pos]]
    invariants: t.List[t.Tuple[str, RExpr, Pos]]
    transitions: t.List[RTrans]
    pos: Pos


@dataclasses.dataclass
class RInstance:
    template: str
    ranges: t.List[t.Tuple[str, RExpr, RExpr]]
    args: t.List[t.Tuple[t.Optional[str], RExpr]]
    pos: Pos


@dataclasses.dataclass
class RModel:
    decls: t.List[t.Any]
    system: t.Optional[t.List[RInstance]]
    system_pos: t.Optional[Pos]
    properties: t.List[t.Tuple[str, str, Pos]]


class _Reader:
    def __init__(self, tokens: t.List[Token], source: t.Optional[str]) -> None:
        self.tokens = tokens
        self.i = 0
        self.source = source

    # helpers ------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def pos(self) -> Pos:
        return Pos(self.tok.line, self.tok.column)

    def error(self, message: str, tok: t.Optional[Token] = None) -> ModelSyntaxError:
        tok = tok or self.tok
        return ModelSyntaxError(message, tok.line, tok.column, self.source)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r} but found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            found = self.tok.text or "end of input"
            raise self.error(f"expected an identifier but found {found!r}")
        text = self.tok.text
        self.i += 1
        return text

    def instance_name(self) -> str:
        name = self.ident()
        while self.at("[") and self.peek().kind == "int" and self.peek(2).text == "]":
            self.i += 1
            name += f"[{self.tok.text}]"
            self.i += 2
        return name

    # top level ----------------------------------------------------------
    def model(self) -> RModel:
        decls: t.List[t.Any] = []
        system = None
        system_pos = None
        props: t.List[t.Tuple[str, str, Pos]] = []
        while self.tok.kind != "eof":
            pos = self.pos()
            if self.accept("const"):
                kind = "bool" if self.accept("bool") else (self.expect("int") and "int")
                while True:
                    p = self.pos()
                    name = self.ident()
                    self.expect("=")
                    decls.append(RConst(name, kind, self.expr(), p))
                    if not self.accept(","):
                        break
                self.expect(";")
            elif self.at("broadcast") or self.at("binary"):
                broadcast = self.tok.text == "broadcast"
                self.i += 1
                self.expect("chan")
                while True:
                    p = self.pos()
                    name = self.ident()
                    size = None
                    if self.accept("["):
                        size = self.expr()
                        self.expect("]")
                    decls.append(RChan(name, broadcast, size, p))
                    if not self.accept(","):
                        break
                self.expect(";")
            elif self.at("var"):
                self.i += 1
                decls.extend(self.var_decls())
            elif self.at("clock"):
                raise self.error("clocks must be declared locally inside an automaton")
            elif self.accept("automaton"):
                decls.append(self.template(pos))
            elif self.accept("system"):
                if system is not None:
                    raise DuplicateDeclaration("second system declaration", pos.line, pos.column, self.source)
                system_pos = pos
                system = [self.instance()]
                while self.accept(","):
                    system.append(self.instance())
                self.expect(";")
            elif self.accept("property"):
                name = self.ident()
                tok = self.tok
                if tok.kind != "string":
                    raise self.error("expected a quoted property expression")
                self.i += 1
                props.append((name, tok.text[1:-1], Pos(tok.line, tok.column + 1)))
                self.expect(";")
            else:
                raise self.error(f"unexpected {self.tok.text!r} at top level")
        return RModel(decls, system, system_pos, props)

    def var_type(self) -> RType:
        if self.accept("bool"):
            return RType("bool")
        if self.accept("clock"):
            return RType("clock")
        self.expect("int")
        self.expect("[")
        lo = self.expr()
        self.expect(",")
        hi = self.expr()
        self.expect("]")
        return RType("int", lo, hi)

    def var_decls(self, allow_clock: bool = False) -> t.List[RVarDecl]:
        if self.at("clock") and not allow_clock:
            raise self.error("clocks must be declared locally inside an automaton")
        if self.at("int") and self.peek().text != "[":
            raise self.error("integer variables need bounds, as in int[0,10]")
        typ = self.var_type()
        out = []
        while True:
            p = self.pos()
            name = self.ident()
            size = None
            if self.accept("["):
                size = self.expr()
                self.expect("]")
            init: t.Union[None, RExpr, t.List[RExpr]] = None
            if self.accept("="):
                if typ.kind == "clock":
                    raise self.error("clocks always start at 0")
                if self.accept("{"):
                    init = [self.expr()]
                    while self.accept(","):
                        init.append(self.expr())
                    self.expect("}")
                else:
                    init = self.expr()
            out.append(RVarDecl(typ, name, size, init, p))
            if not self.accept(","):
                break
        self.expect(";")
        return out

    def template(self, pos: Pos) -> RTemplate:
        name = self.instance_name()
        params: t.List[str] = []
        if self.accept("("):
            if not self.at(")"):
                while True:
                    self.accept("const")
                    self.accept("int")
                    params.append(self.ident())
                    if not self.accept(","):
                        break
            self.expect(")")
        self.expect("{")
        tpl = RTemplate(name, params, [], [], None, [], [], [], pos)
        if self.at("}"):
            raise self.error(f"empty automaton body for {name}")
        while not self.accept("}"):
            p = self.pos()
            if self.accept("local"):
                tpl.locals.extend(self.var_decls(allow_clock=True))
            elif self.accept("location"):
                tpl.locations.append((self.ident(), p))
                while self.accept(","):
                    tpl.locations.append((self.ident(), self.pos()))
                self.expect(";")
            elif self.accept("init"):
                if tpl.initial is not None:
                    raise DuplicateDeclaration(f"second initial location in {name}", p.line, p.column, self.source)
                tpl.initial = (self.ident(), p)
                self.expect(";")
            elif self.accept("committed"):
                tpl.committed.append((self.ident(), p))
                while self.accept(","):
                    tpl.committed.append((self.ident(), self.pos()))
                self.expect(";")
            elif self.accept("inv"):
                loc = self.ident()
                self.expect("{")
                body = RLit(p, True) if self.at("}") else self.expr()
                self.expect("}")
                tpl.invariants.append((loc, body, p))
            elif self.accept("trans"):
                tpl.transitions.append(self.transition(p))
            elif self.tok.kind == "eof":
                raise self.error(f"unterminated automaton {name}")
            else:
                raise self.error(f"unexpected {self.tok.text!r} in automaton {name}")
        if tpl.initial is None:
            raise ModelSyntaxError(f"automaton {name} has no initial location", pos.line, pos.column, self.source)
        return tpl

    def transition(self, pos: Pos) -> RTrans:
        src = self.ident()
        self.expect("->")
        dst = self.ident()
        tr = RTrans(src, dst, [], None, None, [], False, pos)
        self.expect("{")
        while not self.accept("}"):
            if self.accept("select"):
                while True:
                    var = self.ident()
                    self.expect(":")
                    lo = self.expr()
                    self.expect("..")
                    hi = self.expr()
                    tr.selects.append((var, lo, hi))
                    if not self.accept(","):
                        break
            elif self.accept("guard"):
                if tr.guard is not None:
                    raise self.error("second guard clause")
                tr.guard = self.expr()
            elif self.accept("sync"):
                if tr.sync is not None:
                    raise self.error("second sync clause")
                if self.accept("tau"):
                    tr.sync = None
                else:
                    ch = self.postfix(RName(self.pos(), self.ident()))
                    if self.accept("!"):
                        tr.sync = ("send", ch)
                    elif self.accept("?"):
                        tr.sync = ("recv", ch)
                    else:
                        raise self.error("expected '!' or '?' after the channel")
            elif self.accept("do"):
                while True:
                    target = self.postfix(RName(self.pos(), self.ident()))
                    self.expect(":=")
                    tr.updates.append((target, self.expr()))
                    if not self.accept(","):
                        break
            elif self.accept("urgent"):
                tr.urgent = True
            else:
                raise self.error(f"unexpected {self.tok.text!r} in transition")
            if not self.at("}"):
                self.expect(";")
        return tr

    def instance(self) -> RInstance:
        pos = self.pos()
        name = self.instance_name()
        inst = RInstance(name, [], [], pos)
        if self.accept("("):
            if not self.at(")"):
                while True:
                    if self.tok.kind == "ident" and self.peek().text == ":":
                        var = self.ident()
                        self.expect(":")
                        lo = self.expr()
                        self.expect("..")
                        inst.ranges.append((var, lo, self.expr()))
                        inst.args.append((var, RName(pos, var)))
                    elif self.tok.kind == "ident" and self.peek().text == "=":
                        var = self.ident()
                        self.expect("=")
                        inst.args.append((var, self.expr()))
                    else:
                        inst.args.append((None, self.expr()))
                    if not self.accept(","):
                        break
            self.expect(")")
        return inst

    # expressions --------------------------------------------------------
    def expr(self) -> RExpr:
        pos = self.pos()
        if self.at("forall") or self.at("exists"):
            kind = self.tok.text
            self.i += 1
            self.expect("(")
            var = self.ident()
            self.expect(":")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            self.expect(")")
            return RQuant(pos, kind, var, lo, hi, self.expr())
        test = self.implication()
        if self.accept("?"):
            then = self.expr()
            self.expect(":")
            return RCond(pos, test, then, self.expr())
        return test

    def implication(self) -> RExpr:
        pos = self.pos()
        left = self.disjunction()
        if self.accept("=>") or self.accept("imply"):
            return RBin(pos, "=>", left, self.implication())
        return left

    def disjunction(self) -> RExpr:
        left = self.conjunction()
        while self.at("||") or self.at("or"):
            pos = self.pos()
            self.i += 1
            left = RBin(pos, "||", left, self.conjunction())
        return left

    def conjunction(self) -> RExpr:
        left = self.equality()
        while self.at("&&") or self.at("and"):
            pos = self.pos()
            self.i += 1
            left = RBin(pos, "&&", left, self.equality())
        return left

    def equality(self) -> RExpr:
        left = self.relational()
        while self.at("==") or self.at("!="):
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            left = RBin(pos, op, left, self.relational())
        return left

    def relational(self) -> RExpr:
        left = self.additive()
        while self.tok.kind == "op" and self.tok.text in ("<", "<=", ">", ">="):
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            left = RBin(pos, op, left, self.additive())
        return left

    def additive(self) -> RExpr:
        left = self.multiplicative()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            left = RBin(pos, op, left, self.multiplicative())
        return left

    def multiplicative(self) -> RExpr:
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/", "%"):
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            left = RBin(pos, op, left, self.unary())
        return left

    def unary(self) -> RExpr:
        pos = self.pos()
        if self.accept("!") or self.accept("not"):
            return RUn(pos, "!", self.unary())
        if self.accept("-"):
            return RUn(pos, "-", self.unary())
        return self.postfix(self.primary())

    def postfix(self, base: RExpr) -> RExpr:
        while True:
            pos = self.pos()
            if self.accept("["):
                idx = self.expr()
                self.expect("]")
                base = RIndex(pos, base, idx)
            elif self.at(".") and self.peek().kind == "ident":
                self.i += 1
                base = RMember(pos, base, self.ident())
            else:
                return base

    def primary(self) -> RExpr:
        pos = self.pos()
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return RLit(pos, int(tok.text))
        if self.accept("true"):
            return RLit(pos, True)
        if self.accept("false"):
            return RLit(pos, False)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("loc"):
            self.expect("(")
            inst = self.postfix(RName(self.pos(), self.ident()))
            self.expect(")")
            return RLoc(pos, inst)
        if tok.kind == "ident":
            self.i += 1
            return RName(pos, tok.text)
        found = tok.text or "end of input"
        raise self.error(f"expected an expression but found {found!r}")


# ---------------------------------------------------------------------------
# Elaboration

# Types used during checking.  ``catom`` is a clock constraint (a boolean that
# may only appear as a top-level conjunct of a guard or invariant).
INT, BOOL, CLOCK, CLOCKDIFF, CATOM, LOCNAME = "int", "bool", "clock", "clockdiff", "catom", "locname"


@dataclasses.dataclass
class _Binding:
    kind: str  # const | var | array | chan | chanarray
    value: t.Any = None
    type: str = INT
    size: int = 0
    broadcast: bool = False


@dataclasses.dataclass
class _Decls:
    """Global declarations, reusable as context for abstraction files."""

    constants: t.Dict[str, t.Any]
    globals: t.Dict[str, Var]
    global_initial: t.Dict[str, t.Any]
    channels: t.Dict[str, bool]
    scope: t.Dict[str, _Binding]


class _Elaborator:
    def __init__(self, source: t.Optional[str], params: t.Mapping[str, int], context: t.Optional[_Decls]) -> None:
        self.source = source
        self.params = dict(params)
        self.used_params: t.Set[str] = set()
        if context is not None:
            self.decls = _Decls(dict(context.constants), dict(context.globals), dict(context.global_initial),
                                dict(context.channels), dict(context.scope))
        else:
            self.decls = _Decls({}, {}, {}, {}, {})
        self.templates: t.Dict[str, RTemplate] = {}
        self.instances: t.Dict[str, t.Dict[str, t.Any]] = {}  # instance -> info
        self.clock_bounds: t.Dict[str, int] = {}
        self.pos_offset = (0, 0)

    def err(self, cls: t.Type[ModelError], message: str, pos: t.Optional[Pos]) -> ModelError:
        if pos is None:
            return cls(message, 0, 0, self.source)
        return cls(message, pos.line, pos.column, self.source)

    # declarations -----------------------------------------------------
    def declare(self, name: str, binding: _Binding, pos: Pos) -> None:
        if name in self.decls.scope or name in self.templates:
            raise self.err(DuplicateDeclaration, f"{name} is already declared", pos)
        self.decls.scope[name] = binding

    def const_int(self, e: RExpr, scope: t.Mapping[str, _Binding], what: str = "value") -> int:
        value, typ = self.resolve(e, scope, mode="const")
        value = fold(value)
        if not isinstance(value, Const) or typ != INT:
            raise self.err(ModelTypeError, f"{what} must be a constant integer", e.pos)
        return value.value

    def const_value(self, e: RExpr, scope: t.Mapping[str, _Binding], want: str) -> t.Any:
        value, typ = self.resolve(e, scope, mode="const")
        value = fold(value)
        if not isinstance(value, Const):
            raise self.err(ModelTypeError, "expected a constant", e.pos)
        if typ != want:
            raise self.err(ModelTypeError, f"expected a constant of type {want}, got {typ}", e.pos)
        return value.value

    def elaborate(self, raw: RModel, need_system: bool = True) -> Network:
        for d in raw.decls:
            if isinstance(d, RConst):
                if d.name in self.params:
                    value = self.params[d.name]
                    if d.kind == "bool":
                        value = bool(value)
                    self.used_params.add(d.name)
                else:
                    value = self.const_value(d.value, self.decls.scope, d.kind)
                self.declare(d.name, _Binding("const", value, d.kind), d.pos)
                self.decls.constants[d.name] = value
            elif isinstance(d, RChan):
                if d.size is None:
                    self.declare(d.name, _Binding("chan", broadcast=d.broadcast), d.pos)
                    self.decls.channels[d.name] = d.broadcast
                else:
                    n = self.const_int(d.size, self.decls.scope, "array size")
                    if n < 1:
                        raise self.err(ModelTypeError, "array size must be positive", d.size.pos)
                    self.declare(d.name, _Binding("chanarray", size=n, broadcast=d.broadcast), d.pos)
                    for k in range(n):
                        self.decls.channels[f"{d.name}[{k}]"] = d.broadcast
            elif isinstance(d, RVarDecl):
                for var, init, _ in self.make_vars(d, self.decls.scope, prefix=""):
                    self.decls.globals[var.name] = var
                    self.decls.global_initial[var.name] = init
                self.declare(d.name, self.var_binding(d, self.decls.scope, prefix=""), d.pos)
            elif isinstance(d, RTemplate):
                if d.name in self.templates or d.name in self.decls.scope:
                    raise self.err(DuplicateDeclaration, f"{d.name} is already declared", d.pos)
                self.templates[d.name] = d
        unknown = set(self.params) - self.used_params
        if unknown:
            raise UnboundName(f"unknown parameter(s): {', '.join(sorted(unknown))}", 0, 0, self.source)
        if raw.system is None:
            if need_system:
                raise ModelSyntaxError("missing system declaration", 0, 0, self.source)
            return self.finish([], [])
        plan = self.plan_instances(raw.system)
        automata = [self.instantiate(self.templates[tpl], name, args, pos) for tpl, name, args, pos in plan]
        props = [self.make_property(name, text, pos) for name, text, pos in raw.properties]
        return self.finish(automata, props)

    def var_binding(self, d: RVarDecl, scope: t.Mapping[str, _Binding], prefix: str) -> _Binding:
        full = prefix + d.name
        typ = d.type.kind
        if d.size is None:
            return _Binding("var", full, typ)
        n = self.const_int(d.size, scope, "array size")
        return _Binding("array", full, typ, size=n)

    def make_vars(self, d: RVarDecl, scope: t.Mapping[str, _Binding], prefix: str) -> t.List[t.Tuple[t.Optional[Var], t.Any, str]]:
        full = prefix + d.name
        if d.size is None:
            names = [full]
        else:
            n = self.const_int(d.size, scope, "array size")
            if n < 1:
                raise self.err(ModelTypeError, "array size must be positive", d.size.pos)
            names = [f"{full}[{k}]" for k in range(n)]
        if isinstance(d.init, list):
            if len(d.init) != len(names):
                raise self.err(ModelTypeError, f"{d.name} needs {len(names)} initial values", d.pos)
            inits = d.init
        else:
            inits = [d.init] * len(names)
        out: t.List[t.Tuple[t.Optional[Var], t.Any, str]] = []
        for name, init in zip(names, inits):
            if d.type.kind == "clock":
                out.append((None, 0, name))
            elif d.type.kind == "bool":
                value = False if init is None else self.const_value(init, scope, BOOL)
                out.append((Var(name, "bool"), value, name))
            else:
                lo = self.const_int(d.type.lo, scope, "lower bound")
                hi = self.const_int(d.type.hi, scope, "upper bound")
                if lo > hi:
                    raise self.err(ModelTypeError, f"empty range [{lo},{hi}] for {d.name}", d.pos)
                value = max(lo, min(0, hi)) if init is None else self.const_int(init, scope, "initial value")
                if not lo <= value <= hi:
                    raise self.err(ModelTypeError, f"initial value {value} of {d.name} outside [{lo},{hi}]", d.pos)
                out.append((Var(name, "int", lo, hi), value, name))
        return out

    # system ----------------------------------------------------------------
    def plan_instances(self, system: t.List[RInstance]) -> t.List[t.Tuple[str, str, t.Dict[str, t.Any], Pos]]:
        plan = []
        seen: t.Set[str] = set()
        for inst in system:
            tpl = self.templates.get(inst.template)
            if tpl is None:
                raise self.err(UnboundName, f"unknown automaton {inst.template}", inst.pos)
            ranges = []
            for var, lo, hi in inst.ranges:
                a = self.const_int(lo, self.decls.scope, "range bound")
                b = self.const_int(hi, self.decls.scope, "range bound")
                ranges.append((var, list(range(a, b + 1))))
            for combo in itertools.product(*(vals for _, vals in ranges)):
                scope = dict(self.decls.scope)
                for (var, _), value in zip(ranges, combo):
                    scope[var] = _Binding("const", value, INT)
                args: t.Dict[str, t.Any] = {}
                positional = [p for p in tpl.params]
                for k, (pname, expr) in enumerate(inst.args):
                    if pname is None:
                        if k >= len(positional):
                            raise self.err(ModelTypeError, f"too many arguments for {tpl.name}", inst.pos)
                        pname = positional[k]
                    if pname not in tpl.params:
                        raise self.err(UnboundName, f"{tpl.name} has no parameter {pname}", inst.pos)
                    args[pname] = self.const_int(expr, scope, "argument")
                missing = [p for p in tpl.params if p not in args]
                if missing:
                    raise self.err(ModelTypeError, f"missing argument(s) {', '.join(missing)} for {tpl.name}", inst.pos)
                name = tpl.name + "".join(f"[{args[p]}]" for p in tpl.params)
                if name in seen:
                    raise self.err(DuplicateDeclaration, f"automaton instance {name} listed twice", inst.pos)
                seen.add(name)
                plan.append((tpl.name, name, args, inst.pos))
        if not plan:
            raise ModelSyntaxError("empty system declaration", 0, 0, self.source)
        return plan

    def instantiate(self, tpl: RTemplate, name: str, args: t.Dict[str, t.Any], pos: Pos) -> t.Dict[str, t.Any]:
        scope = dict(self.decls.scope)
        for p, value in args.items():
            scope[p] = _Binding("const", value, INT)
        prefix = name + "."
        local_vars: t.List[Var] = []
        local_init: t.Dict[str, t.Any] = {}
        clocks: t.List[str] = []
        local_names: t.Set[str] = set()
        for d in tpl.locals:
            if d.name in local_names or d.name in tpl.params:
                raise self.err(DuplicateDeclaration, f"{d.name} is already declared in {tpl.name}", d.pos)
            local_names.add(d.name)
            for item in self.make_vars(d, scope, prefix):
                if item[0] is None:
                    clocks.append(item[2])
                    local_init[item[2]] = 0
                else:
                    local_vars.append(item[0])
                    local_init[item[0].name] = item[1]
            binding = self.var_binding(d, scope, prefix)
            scope[d.name] = binding

        locations: t.List[str] = []

        def note(loc: str) -> None:
            if loc not in locations:
                locations.append(loc)

        for loc, _ in tpl.locations:
            if loc in locations:
                raise self.err(DuplicateDeclaration, f"location {loc} declared twice", pos)
            note(loc)
        note(tpl.initial[0])
        for loc, _ in tpl.committed:
            note(loc)
        for loc, _, _ in tpl.invariants:
            note(loc)
        for tr in tpl.transitions:
            note(tr.source)
            note(tr.target)

        ctx = {"clocks": set(clocks), "globals": set(), "automaton": name}
        invariants = []
        seen_inv: t.Set[str] = set()
        for loc, body, ipos in tpl.invariants:
            if loc in seen_inv:
                raise self.err(DuplicateDeclaration, f"second invariant for location {loc}", ipos)
            seen_inv.add(loc)
            invariants.append((loc, self.guard(body, scope, ctx)))

        edges: t.List[Edge] = []
        for tr in tpl.transitions:
            sel_ranges = []
            for var, lo, hi in tr.selects:
                a = self.const_int(lo, scope, "select bound")
                b = self.const_int(hi, scope, "select bound")
                sel_ranges.append((var, list(range(a, b + 1))))
            for combo in itertools.product(*(vals for _, vals in sel_ranges)):
                tscope = dict(scope)
                for (var, _), value in zip(sel_ranges, combo):
                    tscope[var] = _Binding("const", value, INT)
                edge = self.edge(tr, tscope, ctx)
                if edge is not None:
                    edges.append(edge)

        types = {c: CLOCK for c in clocks}
        for v in local_vars:
            types[v.name] = BOOL if v.kind == "bool" else INT
        info = {
            "name": name,
            "types": types,
            "locations": tuple(locations),
            "initial_location": tpl.initial[0],
            "committed": frozenset(loc for loc, _ in tpl.committed),
            "clocks": clocks,
            "local_vars": local_vars,
            "initial": local_init,
            "invariants": invariants,
            "edges": edges,
            "globals": ctx["globals"],
            "pos": pos,
        }
        self.instances[name] = info
        return info

    def edge(self, tr: RTrans, scope: t.Mapping[str, _Binding], ctx: t.Dict[str, t.Any]) -> t.Optional[Edge]:
        guard = self.guard(tr.guard, scope, ctx) if tr.guard is not None else Guard()
        if guard.data == Const(False):
            return None  # statically disabled member of a select family
        label = TAU_LABEL
        if tr.sync is not None:
            kind, ref = tr.sync
            label = Label(kind, *self.channel(ref, scope))
        updates: t.List[Assign] = []
        written: t.Set[str] = set()
        for target, value in tr.updates:
            tname, ttype = self.lvalue(target, scope, ctx)
            if tname in written:
                raise self.err(ModelTypeError, f"{tname} is assigned twice on one transition", target.pos)
            written.add(tname)
            expr, vtype = self.resolve(value, scope, ctx=ctx)
            expr = fold(expr)
            if ttype == CLOCK:
                if not (isinstance(expr, Const) and vtype == INT):
                    raise self.err(ModelTypeError, "clocks can only be assigned constants", value.pos)
                if expr.value < 0:
                    raise self.err(ModelTypeError, "clock values cannot be negative", value.pos)
            elif vtype in (CLOCK, CLOCKDIFF, CATOM):
                raise self.err(ModelTypeError, "clock values cannot be assigned to data variables", value.pos)
            elif vtype != ttype:
                raise self.err(ModelTypeError, f"cannot assign a {vtype} to {tname} of type {ttype}", value.pos)
            updates.append(Assign(tname, expr))
        return Edge(tr.source, tr.target, guard, label, tuple(updates), tr.urgent)

    def channel(self, ref: RExpr, scope: t.Mapping[str, _Binding]) -> t.Tuple[str, bool]:
        if isinstance(ref, RName):
            b = scope.get(ref.name)
            if b is None:
                raise self.err(UnboundName, f"unknown channel {ref.name}", ref.pos)
            if b.kind == "chanarray":
                raise self.err(ModelTypeError, f"channel array {ref.name} needs an index", ref.pos)
            if b.kind != "chan":
                raise self.err(ModelTypeError, f"{ref.name} is not a channel", ref.pos)
            return ref.name, b.broadcast
        if isinstance(ref, RIndex) and isinstance(ref.base, RName):
            b = scope.get(ref.base.name)
            if b is None:
                raise self.err(UnboundName, f"unknown channel {ref.base.name}", ref.pos)
            if b.kind != "chanarray":
                raise self.err(ModelTypeError, f"{ref.base.name} is not a channel array", ref.pos)
            k = self.const_int(ref.index, scope, "channel index")
            if not 0 <= k < b.size:
                raise self.err(ModelTypeError, f"index {k} out of bounds for {ref.base.name}[{b.size}]", ref.pos)
            return f"{ref.base.name}[{k}]", b.broadcast
        raise self.err(ModelSyntaxError, "malformed channel reference", ref.pos)

    def lvalue(self, target: RExpr, scope: t.Mapping[str, _Binding], ctx: t.Dict[str, t.Any]) -> t.Tuple[str, str]:
        expr, typ = self.resolve(target, scope, ctx=ctx)
        if not isinstance(expr, Ref):
            raise self.err(ModelTypeError, "only variables can be assigned", target.pos)
        return expr.name, typ

    def guard(self, raw: RExpr, scope: t.Mapping[str, _Binding], ctx: t.Dict[str, t.Any]) -> Guard:
        expr, typ = self.resolve(raw, scope, ctx=ctx, clock_atoms=True)
        if typ not in (BOOL, CATOM):
            raise self.err(ModelTypeError, f"guard must be boolean, got {typ}", raw.pos)
        atoms: t.List[ClockAtom] = []
        data: t.List[Expr] = []
        for part in _conjuncts(expr):
            if part.refs() & ctx["clocks"]:
                atoms.append(self.clock_atom(part, ctx, raw.pos))
            else:
                data.append(part)
        return Guard(tuple(atoms), fold(conj(data)))

    def clock_atom(self, e: Expr, ctx: t.Dict[str, t.Any], pos: Pos) -> ClockAtom:
        clocks = ctx["clocks"]
        if not (isinstance(e, Binary) and e.op in COMPARE_OPS):
            raise self.err(ModelTypeError, "clock constraints must be comparisons", pos)
        op, left, right = e.op, fold(e.left), fold(e.right)
        if not (left.refs() & clocks):
            left, right = right, left
            op = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}[op]
        if op == "!=":
            raise self.err(ModelTypeError, "clock disequality is not a simple constraint", pos)
        if right.refs() & clocks:
            if isinstance(left, Ref) and isinstance(right, Ref):
                left, right = Binary("-", left, right), Const(0)
            else:
                raise self.err(ModelTypeError, "unsupported clock constraint", pos)
        if not isinstance(right, Const):
            raise self.err(ModelTypeError, "mixed clock/data atom: clocks may only be compared with constants", pos)
        bound = right.value
        if isinstance(left, Ref) and left.name in clocks:
            atom = ClockAtom(left.name, op, bound)
        elif (isinstance(left, Binary) and left.op == "-" and isinstance(left.left, Ref)
              and isinstance(left.right, Ref) and left.left.name in clocks and left.right.name in clocks):
            atom = ClockAtom(left.left.name, op, bound, left.right.name)
        else:
            raise self.err(ModelTypeError, "unsupported clock constraint", pos)
        for c in atom.clocks():
            self.clock_bounds[c] = max(self.clock_bounds.get(c, 0), abs(bound))
        return atom

    # properties ------------------------------------------------------------
    def make_property(self, name: str, text: str, pos: Pos) -> Property:
        tokens = tokenize(text, pos.line, pos.column)
        reader = _Reader(tokens, self.source)
        raw = reader.expr()
        if reader.tok.kind != "eof":
            raise reader.error(f"unexpected {reader.tok.text!r} in property")
        expr, typ = self.resolve(raw, self.decls.scope, mode="property")
        if typ not in (BOOL, CATOM):
            raise self.err(ModelTypeError, f"property {name} is not boolean", pos)
        expr = fold(expr)
        for part in _atoms_with_clocks(expr, self.all_clocks):
            for c, bound in part:
                self.clock_bounds[c] = max(self.clock_bounds.get(c, 0), abs(bound))
        return Property(name, expr)

    # name resolution -----------------------------------------------------------
    def resolve(self, e: RExpr, scope: t.Mapping[str, _Binding], mode: str = "auto",
                ctx: t.Optional[t.Dict[str, t.Any]] = None, clock_atoms: bool = False) -> t.Tuple[Expr, str]:
        """Resolve and type-check a raw expression.

        ``mode`` is ``const`` (only constants allowed), ``property`` (instance
        members and ``loc(...)`` allowed) or ``auto`` (inside an automaton).
        """
        r = lambda x, atoms=False: self.resolve(x, scope, mode, ctx, atoms)  # noqa: E731
        if isinstance(e, RLit):
            return Const(e.value), (BOOL if isinstance(e.value, bool) else INT)
        if isinstance(e, RName):
            return self.lookup(e, scope, mode, ctx)
        if isinstance(e, RIndex):
            return self.index(e, scope, mode, ctx)
        if isinstance(e, RMember):
            if mode != "property":
                raise self.err(ModelTypeError, "member access is only allowed in properties", e.pos)
            inst = self.instance_ref(e.base, scope)
            full = f"{inst}.{e.field}"
            info = self.instances[inst]
            if full in info["types"]:
                return Ref(full), info["types"][full]
            raise self.err(UnboundName, f"{inst} has no variable {e.field}", e.pos)
        if isinstance(e, RLoc):
            if mode != "property":
                raise self.err(ModelTypeError, "loc(...) is only allowed in properties", e.pos)
            inst = self.instance_ref(e.inst, scope)
            return Ref(f"loc({inst})"), f"loc:{inst}"
        if isinstance(e, RUn):
            arg, typ = r(e.arg)
            if e.op == "!":
                if typ == CATOM and mode != "property":
                    raise self.err(ModelTypeError, "negated clock constraints are not allowed", e.pos)
                if typ not in (BOOL, CATOM):
                    raise self.err(ModelTypeError, f"'!' needs a boolean, got {typ}", e.pos)
                return Unary("!", arg), typ
            if typ != INT:
                raise self.err(ModelTypeError, f"unary '-' needs an integer, got {typ}", e.pos)
            return Unary("-", arg), INT
        if isinstance(e, RBin):
            return self.binary(e, scope, mode, ctx, clock_atoms)
        if isinstance(e, RCond):
            test, tt = r(e.test)
            a, ta = r(e.then)
            b, tb = r(e.other)
            if tt != BOOL:
                raise self.err(ModelTypeError, "condition of '?:' must be a clock-free boolean", e.pos)
            if ta != tb or ta not in (INT, BOOL):
                raise self.err(ModelTypeError, f"branches of '?:' have types {ta} and {tb}", e.pos)
            return Cond(test, a, b), ta
        if isinstance(e, RQuant):
            lo = self.const_int(e.lo, scope, "quantifier bound")
            hi = self.const_int(e.hi, scope, "quantifier bound")
            parts = []
            typ = BOOL
            for k in range(lo, hi + 1):
                inner = dict(scope)
                inner[e.var] = _Binding("const", k, INT)
                body, bt = self.resolve(e.body, inner, mode, ctx, clock_atoms)
                if bt not in (BOOL, CATOM):
                    raise self.err(ModelTypeError, "quantified expression must be boolean", e.pos)
                if bt == CATOM:
                    typ = CATOM
                parts.append(body)
            if e.kind == "exists" and typ == CATOM and mode != "property":
                raise self.err(ModelTypeError, "disjunction over clock atoms is not allowed", e.pos)
            return (conj(parts) if e.kind == "forall" else disj(parts)), typ
        raise self.err(ModelSyntaxError, "malformed expression", e.pos)

    def binary(self, e: RBin, scope, mode, ctx, clock_atoms) -> t.Tuple[Expr, str]:
        a, ta = self.resolve(e.left, scope, mode, ctx, clock_atoms)
        b, tb = self.resolve(e.right, scope, mode, ctx, clock_atoms)
        op = e.op
        clockish = (CLOCK, CLOCKDIFF)
        if op in ARITH_OPS:
            if ta == CLOCK and tb == CLOCK and op == "-":
                return Binary("-", a, b), CLOCKDIFF
            if ta in clockish or tb in clockish:
                raise self.err(ModelTypeError, "arithmetic on clocks is limited to differences of two clocks", e.pos)
            if ta != INT or tb != INT:
                raise self.err(ModelTypeError, f"'{op}' needs integers, got {ta} and {tb}", e.pos)
            return Binary(op, a, b), INT
        if op in COMPARE_OPS:
            if ta in clockish or tb in clockish:
                other = tb if ta in clockish else ta
                if other == INT:
                    data = (b if ta in clockish else a).refs()
                    if data and mode != "property":
                        raise self.err(ModelTypeError, "mixed clock/data atom: clocks may only be compared with constants", e.pos)
                    return Binary(op, a, b), CATOM
                if other in clockish:
                    return Binary(op, a, b), CATOM
                raise self.err(ModelTypeError, f"cannot compare a clock with a {other}", e.pos)
            if ta.startswith("loc:") or tb.startswith("loc:"):
                return self.loc_compare(e, a, ta, b, tb)
            if ta == LOCNAME or tb == LOCNAME:
                raise self.err(UnboundName, f"unknown name {_locname(a, b)}", e.pos)
            if op in ("==", "!="):
                if ta != tb:
                    raise self.err(ModelTypeError, f"cannot compare {ta} with {tb}", e.pos)
                return Binary(op, a, b), BOOL
            if ta != INT or tb != INT:
                raise self.err(ModelTypeError, f"'{op}' needs integers, got {ta} and {tb}", e.pos)
            return Binary(op, a, b), BOOL
        # logical connectives
        for typ in (ta, tb):
            if typ not in (BOOL, CATOM):
                raise self.err(ModelTypeError, f"'{op}' needs booleans, got {typ}", e.pos)
        if CATOM in (ta, tb):
            if mode == "property":
                return Binary(op, a, b), CATOM
            if op == "||":
                raise self.err(ModelTypeError, "disjunction over clock atoms is not allowed", e.pos)
            if op == "=>":
                raise self.err(ModelTypeError, "implication over clock atoms is not allowed", e.pos)
            return Binary(op, a, b), CATOM
        return Binary(op, a, b), BOOL

    def loc_compare(self, e: RBin, a: Expr, ta: str, b: Expr, tb: str) -> t.Tuple[Expr, str]:
        if e.op not in ("==", "!="):
            raise self.err(ModelTypeError, "locations can only be compared with == or !=", e.pos)
        if not ta.startswith("loc:"):
            a, ta, b, tb = b, tb, a, ta
        inst = ta[4:]
        if tb == LOCNAME:
            name = b.value
            if name not in self.instances[inst]["locations"]:
                raise self.err(UnboundName, f"{inst} has no location {name}", e.pos)
            return Binary(e.op, a, b), BOOL
        if tb == ta:
            return Binary(e.op, a, b), BOOL
        raise self.err(ModelTypeError, f"cannot compare a location of {inst} with {tb}", e.pos)

    def lookup(self, e: RName, scope, mode, ctx) -> t.Tuple[Expr, str]:
        b = scope.get(e.name)
        if b is None:
            if mode == "property":
                return Const(e.name), LOCNAME
            raise self.err(UnboundName, f"unknown name {e.name}", e.pos)
        if b.kind == "const":
            return Const(b.value), b.type
        if mode == "const":
            raise self.err(ModelTypeError, f"{e.name} is not a constant", e.pos)
        if b.kind == "var":
            if ctx is not None and b.value in self.decls.globals:
                ctx["globals"].add(b.value)
            return Ref(b.value), b.type
        if b.kind in ("array", "chanarray"):
            raise self.err(ModelTypeError, f"array {e.name} needs an index", e.pos)
        raise self.err(ModelTypeError, f"channel {e.name} used as a value", e.pos)

    def index(self, e: RIndex, scope, mode, ctx) -> t.Tuple[Expr, str]:
        if not isinstance(e.base, RName):
            raise self.err(ModelTypeError, "only named arrays can be indexed", e.pos)
        b = scope.get(e.base.name)
        if b is None:
            raise self.err(UnboundName, f"unknown name {e.base.name}", e.pos)
        if b.kind != "array":
            raise self.err(ModelTypeError, f"{e.base.name} is not an array variable", e.pos)
        if mode == "const":
            raise self.err(ModelTypeError, f"{e.base.name} is not a constant", e.pos)
        k = self.const_int(e.index, scope, "array index (a compile-time constant)")
        if not 0 <= k < b.size:
            raise self.err(ModelTypeError, f"index {k} out of bounds for {e.base.name}[{b.size}]", e.pos)
        name = f"{b.value}[{k}]"
        if ctx is not None and name in self.decls.globals:
            ctx["globals"].add(name)
        return Ref(name), b.type

    def instance_ref(self, e: RExpr, scope) -> str:
        name = self.instance_path(e, scope)
        if name not in self.instances:
            raise self.err(UnboundName, f"unknown automaton {name}", e.pos)
        return name

    def instance_path(self, e: RExpr, scope) -> str:
        if isinstance(e, RName):
            return e.name
        if isinstance(e, RIndex):
            return f"{self.instance_path(e.base, scope)}[{self.const_int(e.index, scope, 'instance index')}]"
        raise self.err(ModelSyntaxError, "expected an automaton name", e.pos)

    # assembly ------------------------------------------------------------------
    @property
    def all_clocks(self) -> t.Set[str]:
        out: t.Set[str] = set()
        for info in self.instances.values():
            out.update(info["clocks"])
        return out

    def finish(self, automata: t.List[t.Dict[str, t.Any]], props: t.List[Property]) -> Network:
        built = []
        for info in automata:
            clocks = [Var(c, "clock", 0, self.clock_bounds.get(c, 0) + 1) for c in info["clocks"]]
            internal = tuple(clocks) + tuple(info["local_vars"])
            external = tuple(self.decls.globals[g] for g in sorted(info["globals"]))
            initial = dict(info["initial"])
            for g in external:
                initial[g.name] = self.decls.global_initial[g.name]
            built.append(
                TimedAutomaton(
                    name=info["name"],
                    locations=info["locations"],
                    initial_location=info["initial_location"],
                    committed=info["committed"],
                    internal=internal,
                    external=external,
                    initial=tuple(sorted(initial.items())),
                    invariants=tuple(info["invariants"]),
                    edges=tuple(info["edges"]),
                )
            )
        return Network(
            automata=tuple(built),
            channels=tuple(self.decls.channels.items()),
            globals=tuple(self.decls.globals.values()),
            global_initial=tuple(self.decls.global_initial.items()),
            properties=tuple(props),
            constants=tuple(self.decls.constants.items()),
        )


def _conjuncts(e: Expr) -> t.List[Expr]:
    if isinstance(e, Binary) and e.op == "&&":
        return _conjuncts(e.left) + _conjuncts(e.right)
    return [e]


def _atoms_with_clocks(e: Expr, clocks: t.Set[str]) -> t.Iterator[t.List[t.Tuple[str, int]]]:
    if isinstance(e, Binary) and e.op in COMPARE_OPS:
        names = [n for n in e.refs() if n in clocks]
        if names:
            consts = [x.value for x in (e.left, e.right) if isinstance(x, Const) and isinstance(x.value, int)]
            yield [(n, c) for n in names for c in consts]
        return
    if isinstance(e, Binary):
        yield from _atoms_with_clocks(e.left, clocks)
        yield from _atoms_with_clocks(e.right, clocks)
    elif isinstance(e, Unary):
        yield from _atoms_with_clocks(e.arg, clocks)
    elif isinstance(e, Cond):
        for x in (e.test, e.then, e.other):
            yield from _atoms_with_clocks(x, clocks)


def _locname(a: Expr, b: Expr) -> str:
    for x in (a, b):
        if isinstance(x, Const) and isinstance(x.value, str):
            return x.value
    return "?"


def parse_model(
    text: str,
    params: t.Optional[t.Mapping[str, int]] = None,
    source: t.Optional[str] = None,
    context: t.Optional[Network] = None,
) -> Network:
    """Parse and elaborate a model.

    ``params`` override top-level ``const`` declarations.  ``context`` supplies
    global declarations (constants, channels and variables) from another
    network; it is used to read abstraction files that refer to the
    declarations of the concrete model.
    """
    raw = _Reader(tokenize(text), source).model()
    elab = _Elaborator(source, params or {}, _context_decls(context) if context is not None else None)
    if context is not None:
        # parameters were already applied to the context
        elab.params = {k: v for k, v in elab.params.items() if k not in dict(context.constants)}
    return elab.elaborate(raw)


def _context_decls(net: Network) -> _Decls:
    scope: t.Dict[str, _Binding] = {}
    for name, value in net.constants:
        scope[name] = _Binding("const", value, BOOL if isinstance(value, bool) else INT)
    arrays: t.Dict[str, t.List[int]] = {}
    for name, broadcast in net.channels:
        base, k = _split_index(name)
        if k is None:
            scope[name] = _Binding("chan", broadcast=broadcast)
        else:
            arrays.setdefault(base, []).append(k)
            scope[base] = _Binding("chanarray", size=max(arrays[base]) + 1, broadcast=broadcast)
    var_arrays: t.Dict[str, t.List[int]] = {}
    for v in net.globals:
        typ = BOOL if v.kind == "bool" else INT
        base, k = _split_index(v.name)
        if k is None:
            scope[v.name] = _Binding("var", v.name, typ)
        else:
            var_arrays.setdefault(base, []).append(k)
            scope[base] = _Binding("array", base, typ, size=max(var_arrays[base]) + 1)
    return _Decls(dict(net.constants), {v.name: v for v in net.globals}, dict(net.global_initial),
                  dict(net.channels), scope)


_INDEX_RE = re.compile(r"^(.*)\[(\d+)\]$")


def _split_index(name: str) -> t.Tuple[str, t.Optional[int]]:
    m = _INDEX_RE.match(name)
    if m is None:
        return name, None
    return m.group(1), int(m.group(2))


def load_model(path: str, params: t.Optional[t.Mapping[str, int]] = None,
               context: t.Optional[Network] = None) -> Network:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_model(text, params, source=str(path), context=context)


def declared_constants(text: str) -> t.FrozenSet[str]:
    """Names of the top-level constants a model declares (parameters it
    accepts)."""
    raw = _Reader(tokenize(text), None).model()
    return frozenset(d.name for d in raw.decls if isinstance(d, RConst))
