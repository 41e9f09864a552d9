"""Formula AST shared by the four logics, plus the textual DSL.

Grammar (lowest to highest binding)::

    formula  := binder | implies
    binder   := "forall" IDENT "in" IDENT [ "[" NUM "," NUM "]" ] ":" formula
              | "let" IDENT ":=" IDENT "in" formula
    implies  := or [ "->" implies ]
    or       := par { "|" par }
    par      := chop { "||" chop }
    chop     := and [ ( ";" | ";[" constraint "]" ) chop ]
    and      := until { "&" until }
    until    := unary [ "U" until ]
    unary    := ( "!" | "X" | "<>" | "[]" ) unary | postfix
    postfix  := primary { "*" }
    primary  := "true" | "false" | "skip" | "Tf" CMP NUM
              | IDENT CMP value | IDENT | "(" formula ")"
    constraint := "x" CMP NUM { "&" "x" CMP NUM }

``->``, ``U`` and both chops associate to the right (so in a timed chain each
constraint bounds exactly one step); ``&``, ``|`` and ``||`` associate to the left.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional, Tuple, Union


class Logic(IntEnum):
    PROP = 0
    LTL = 1
    ITL = 2
    RASL = 3

    def __str__(self) -> str:
        return _LOGIC_NAMES[self]

    @classmethod
    def parse(cls, text: str) -> "Logic":
        key = text.strip().lower()
        for logic, name in _LOGIC_NAMES.items():
            if name.lower() == key:
                return logic
        if key in ("propositional", "propositional logic"):
            return cls.PROP
        raise ValueError(f"unknown logic {text!r}")


_LOGIC_NAMES = {Logic.PROP: "Prop", Logic.LTL: "LTL", Logic.ITL: "ITL", Logic.RASL: "RASL"}

CMP_OPS = ("<", "<=", ">", ">=", "=", "!=")


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class LogicError(FormulaError):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


# --------------------------------------------------------------------------
# AST


class Formula:
    __slots__ = ()

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Var:
    name: str


Constant = Union[int, float, str, Var]


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class AttrCmp(Formula):
    attr: str
    op: str
    value: Constant


@dataclass(frozen=True)
class ForAll(Formula):
    """Quantifies ``var`` over the values of ``attr`` observed in the current scope,
    optionally restricted to the numeric range [lo, hi]."""

    var: str
    attr: str
    body: Formula
    lo: Optional[float] = None
    hi: Optional[float] = None

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Let(Formula):
    """Binds ``var`` to the value of ``attr`` at the first event of the scope."""

    var: str
    attr: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Not(Formula):
    f: Formula

    def children(self):
        return (self.f,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Implies(_Binary):
    pass


class Until(_Binary):
    pass


class Chop(_Binary):
    pass


class Parallel(_Binary):
    pass


# dataclass() on the subclasses keeps structural __eq__ type-sensitive
for _cls in (And, Or, Implies, Until, Chop, Parallel):
    dataclass(frozen=True)(_cls)


@dataclass(frozen=True)
class Next(Formula):
    f: Formula

    def children(self):
        return (self.f,)


@dataclass(frozen=True)
class Eventually(Formula):
    f: Formula

    def children(self):
        return (self.f,)


@dataclass(frozen=True)
class Globally(Formula):
    f: Formula

    def children(self):
        return (self.f,)


@dataclass(frozen=True)
class ChopStar(Formula):
    f: Formula

    def children(self):
        return (self.f,)


@dataclass(frozen=True)
class Skip(Formula):
    pass


@dataclass(frozen=True)
class ElapsedCmp(Formula):
    op: str
    bound: float

    def __post_init__(self):
        if self.bound < 0:
            raise FormulaError("elapsed-time bound must be >= 0")


@dataclass(frozen=True)
class TimedChop(Formula):
    """``left ;[constraint] right``; constraint is a tuple of (op, bound) conjuncts."""

    left: Formula
    constraint: Tuple[Tuple[str, float], ...]
    right: Formula

    def __post_init__(self):
        if not self.constraint:
            raise FormulaError("timed chop needs at least one constraint")
        for _, bound in self.constraint:
            if bound < 0:
                raise FormulaError("elapsed-time bound must be >= 0")

    def children(self):
        return (self.left, self.right)


TRUE = Const(True)
FALSE = Const(False)

_TEMPORAL = (Next, Until, Eventually, Globally, Chop, ChopStar, Parallel, Skip, TimedChop)


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def is_temporal(f: Formula) -> bool:
    # Tf constraints alone are not temporal: on a point interval they still carry meaning.
    return any(isinstance(n, _TEMPORAL) for n in walk(f))


def atoms(f: Formula) -> set:
    return {n.name for n in walk(f) if isinstance(n, Atom)}


def attributes(f: Formula) -> set:
    out = set()
    for n in walk(f):
        if isinstance(n, (AttrCmp, ForAll, Let)):
            out.add(n.attr)
    return out


def depth(f: Formula) -> int:
    kids = f.children()
    return 1 + (max(depth(k) for k in kids) if kids else 0)


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for g in fs[1:]:
        out = And(out, g)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[0]
    for g in fs[1:]:
        out = Or(out, g)
    return out


# --------------------------------------------------------------------------
# Logic membership

_MIN_LOGIC = {
    Const: Logic.PROP,
    Atom: Logic.PROP,
    AttrCmp: Logic.PROP,
    ForAll: Logic.PROP,
    Let: Logic.PROP,
    Not: Logic.PROP,
    And: Logic.PROP,
    Or: Logic.PROP,
    Implies: Logic.PROP,
    Next: Logic.LTL,
    Until: Logic.LTL,
    Eventually: Logic.LTL,
    Globally: Logic.LTL,
    Chop: Logic.ITL,
    ChopStar: Logic.ITL,
    Parallel: Logic.ITL,
    Skip: Logic.RASL,
    ElapsedCmp: Logic.RASL,
    TimedChop: Logic.RASL,
}

_CONNECTIVE_NAMES = {
    Next: "next",
    Until: "until",
    Eventually: "eventually",
    Globally: "globally",
    Chop: "chop",
    ChopStar: "chop-star",
    Parallel: "parallel",
    Skip: "skip",
}


def min_logic(f: Formula) -> Logic:
    return max(_MIN_LOGIC[type(n)] for n in walk(f))


def validate_for_logic(f: Formula, logic: Logic) -> list:
    """Return the list of violations of ``f`` at ``logic``; empty means valid."""
    violations = []
    seen = set()

    def visit(node: Formula, bound: tuple):
        need = _MIN_LOGIC[type(node)]
        if need > logic:
            if isinstance(node, (ElapsedCmp, TimedChop)):
                msg = "timed constraint requires RASL"
            else:
                msg = f"{_CONNECTIVE_NAMES[type(node)]} not in {logic}"
            if msg not in seen:
                seen.add(msg)
                violations.append(msg)
        if isinstance(node, AttrCmp) and isinstance(node.value, Var) and node.value.name not in bound:
            violations.append(f"unbound variable {node.value.name}")
        if isinstance(node, (ForAll, Let)):
            if node.var in bound:
                violations.append(f"duplicate binder {node.var}")
            visit(node.body, bound + (node.var,))
            return
        for kid in node.children():
            visit(kid, bound)

    visit(f, ())
    return violations


def check_logic(f: Formula, logic: Logic) -> Formula:
    problems = validate_for_logic(f, logic)
    if problems:
        raise LogicError(problems)
    return f


# --------------------------------------------------------------------------
# Derived-operator expansion


def expand_derived(f: Formula, logic: Logic) -> Formula:
    """Rewrite ``f`` into the core connectives of ``logic``.

    Core sets: Prop {Const, Atom, AttrCmp, ForAll, Let, Not, Or};
    LTL adds {Next, Until}; ITL adds {Chop, ChopStar}; RASL replaces Next
    by skip-chop and adds {Skip, ElapsedCmp}.
    """
    memo = {}

    def ex(node: Formula) -> Formula:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        out = _expand_node(node, logic, ex)
        memo[key] = (node, out)
        return out

    return ex(f)


def _constraint_formula(constraint) -> Formula:
    return conj(*[ElapsedCmp(op, c) for op, c in constraint])


def _not(f: Formula) -> Formula:
    return Not(f)


def _and(a: Formula, b: Formula) -> Formula:
    return Not(Or(Not(a), Not(b)))


def _expand_node(node: Formula, logic: Logic, ex) -> Formula:
    t = type(node)
    if t in (Const, Atom, AttrCmp, Skip, ElapsedCmp):
        return node
    if t is ForAll:
        body = ex(node.body)
        return node if body is node.body else ForAll(node.var, node.attr, body, node.lo, node.hi)
    if t is Let:
        body = ex(node.body)
        return node if body is node.body else Let(node.var, node.attr, body)
    if t is Not:
        inner = ex(node.f)
        return node if inner is node.f else Not(inner)
    if t is Or:
        a, b = ex(node.left), ex(node.right)
        return node if (a is node.left and b is node.right) else Or(a, b)
    if t is And:
        return _and(ex(node.left), ex(node.right))
    if t is Implies:
        return Or(Not(ex(node.left)), ex(node.right))
    if t is Next:
        inner = ex(node.f)
        if logic >= Logic.RASL:
            return Chop(Skip(), inner)
        return node if inner is node.f else Next(inner)
    if t is Until:
        a, b = ex(node.left), ex(node.right)
        return node if (a is node.left and b is node.right) else Until(a, b)
    if t is Eventually:
        inner = ex(node.f)
        if logic >= Logic.ITL:
            return Chop(TRUE, inner)
        return Until(TRUE, inner)
    if t is Globally:
        return Not(ex(Eventually(Not(node.f))))
    if t is Chop:
        a, b = ex(node.left), ex(node.right)
        return node if (a is node.left and b is node.right) else Chop(a, b)
    if t is ChopStar:
        inner = ex(node.f)
        return node if inner is node.f else ChopStar(inner)
    if t is Parallel:
        a, b = ex(node.left), ex(node.right)
        return Or(_and(a, Chop(b, TRUE)), _and(b, Chop(a, TRUE)))
    if t is TimedChop:
        a, b = ex(node.left), ex(node.right)
        return Chop(_and(a, ex(_constraint_formula(node.constraint))), b)
    raise TypeError(f"unknown formula node {node!r}")


def erase_timing(f: Formula) -> Formula:
    """Drop every elapsed-time constraint: timed chop becomes plain chop and
    Tf comparisons become ``true`` (conjunctions with ``true`` are simplified)."""
    t = type(f)
    if t is TimedChop:
        return Chop(erase_timing(f.left), erase_timing(f.right))
    if t is ElapsedCmp:
        return TRUE
    if t is And:
        a, b = erase_timing(f.left), erase_timing(f.right)
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        return And(a, b)
    if isinstance(f, _Binary):
        return t(erase_timing(f.left), erase_timing(f.right))
    if t in (Not, Next, Eventually, Globally, ChopStar):
        return t(erase_timing(f.f))
    if t is ForAll:
        return ForAll(f.var, f.attr, erase_timing(f.body), f.lo, f.hi)
    if t is Let:
        return Let(f.var, f.attr, erase_timing(f.body))
    return f


# --------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<op>->|\|\||<>|\[\]|:=|<=|>=|!=|[!&|;*()\[\],:<>=])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false", "skip", "Tf", "X", "U", "forall", "let", "in"}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _lex(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "ident" and tok in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, tok, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def eat(self, text: str) -> _Tok:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        tok = self.tok
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise ParseError(f"expected identifier, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        name = self.tok.text
        self.i += 1
        return name

    def number(self) -> Union[int, float]:
        if self.tok.kind != "num":
            raise ParseError(f"expected number, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        text = self.tok.text
        self.i += 1
        return _to_number(text)

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return f

    def formula(self) -> Formula:
        if self.at("forall"):
            self.eat("forall")
            var = self.ident()
            self.eat("in")
            attr = self.ident()
            lo = hi = None
            if self.at("["):
                self.eat("[")
                lo = self.number()
                self.eat(",")
                hi = self.number()
                self.eat("]")
            self.eat(":")
            return ForAll(var, attr, self.formula(), lo, hi)
        if self.at("let"):
            self.eat("let")
            var = self.ident()
            self.eat(":=")
            attr = self.ident()
            self.eat("in")
            return Let(var, attr, self.formula())
        return self.implies()

    def implies(self) -> Formula:
        left = self.or_()
        if self.at("->"):
            self.eat("->")
            return Implies(left, self.implies())
        return left

    def or_(self) -> Formula:
        f = self.par()
        while self.at("|"):
            self.eat("|")
            f = Or(f, self.par())
        return f

    def par(self) -> Formula:
        f = self.chop()
        while self.at("||"):
            self.eat("||")
            f = Parallel(f, self.chop())
        return f

    def chop(self) -> Formula:
        left = self.and_()
        if not self.at(";"):
            return left
        self.eat(";")
        if self.at("["):
            constraint = self.constraint()
            return TimedChop(left, constraint, self.chop())
        return Chop(left, self.chop())

    def constraint(self):
        self.eat("[")
        parts = []
        while True:
            tok = self.tok
            if tok.kind != "ident" or tok.text != "x":
                raise ParseError("expected 'x' in timed-chop constraint", tok.pos)
            self.i += 1
            op = self.cmp_op()
            parts.append((op, float(self.number())))
            if self.at("&"):
                self.eat("&")
                continue
            break
        self.eat("]")
        return tuple(parts)

    def and_(self) -> Formula:
        f = self.until()
        while self.at("&"):
            self.eat("&")
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.at("U"):
            self.eat("U")
            return Until(left, self.until())
        return left

    def unary(self) -> Formula:
        if self.at("!"):
            self.eat("!")
            return Not(self.unary())
        if self.at("X"):
            self.eat("X")
            return Next(self.unary())
        if self.at("<>"):
            self.eat("<>")
            return Eventually(self.unary())
        if self.at("[]"):
            self.eat("[]")
            return Globally(self.unary())
        return self.postfix()

    def postfix(self) -> Formula:
        f = self.primary()
        while self.at("*"):
            self.eat("*")
            f = ChopStar(f)
        return f

    def cmp_op(self) -> str:
        tok = self.tok
        if tok.kind == "op" and tok.text in CMP_OPS:
            self.i += 1
            return tok.text
        raise ParseError(f"expected comparison operator, found {tok.text or 'end of input'!r}", tok.pos)

    def primary(self) -> Formula:
        tok = self.tok
        if self.at("("):
            self.eat("(")
            f = self.formula()
            self.eat(")")
            return f
        if self.at("true"):
            self.eat("true")
            return TRUE
        if self.at("false"):
            self.eat("false")
            return FALSE
        if self.at("skip"):
            self.eat("skip")
            return Skip()
        if self.at("Tf"):
            self.eat("Tf")
            op = self.cmp_op()
            bound = float(self.number())
            if bound < 0:
                raise ParseError("elapsed-time bound must be >= 0", tok.pos)
            return ElapsedCmp(op, bound)
        if tok.kind == "ident":
            name = self.ident()
            if self.tok.kind == "op" and self.tok.text in CMP_OPS:
                op = self.cmp_op()
                return AttrCmp(name, op, self.value())
            return Atom(name)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)

    def value(self) -> Constant:
        tok = self.tok
        if tok.kind == "num":
            return self.number()
        if tok.kind == "str":
            self.i += 1
            return json.loads(tok.text)
        if tok.kind == "ident":
            return Var(self.ident())
        raise ParseError(f"expected a constant or variable, found {tok.text or 'end of input'!r}", tok.pos)


def _to_number(text: str) -> Union[int, float]:
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    return float(text)


def parse_formula(text: str, logic: Optional[Logic] = None) -> Formula:
    """Parse DSL text; when ``logic`` is given, reject connectives outside it."""
    f = _Parser(text).parse()
    if logic is not None:
        check_logic(f, logic)
    return f


# --------------------------------------------------------------------------
# Formatter

_P_BINDER, _P_IMPL, _P_OR, _P_PAR, _P_CHOP, _P_AND, _P_UNTIL, _P_UNARY, _P_POST, _P_ATOM = range(10)

_BINARY = {
    Implies: (" -> ", _P_IMPL, "right"),
    Or: (" | ", _P_OR, "left"),
    Parallel: (" || ", _P_PAR, "left"),
    Chop: (" ; ", _P_CHOP, "right"),
    And: (" & ", _P_AND, "left"),
    Until: (" U ", _P_UNTIL, "right"),
}

_UNARY = {Not: "!", Next: "X ", Eventually: "<>", Globally: "[]"}


def _fmt_num(x) -> str:
    if isinstance(x, bool):
        raise FormulaError("booleans are not DSL constants")
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _fmt_value(v: Constant) -> str:
    if isinstance(v, Var):
        return v.name
    if isinstance(v, str):
        return json.dumps(v)
    return _fmt_num(v)


def _fmt(f: Formula):
    t = type(f)
    if t is Const:
        return ("true" if f.value else "false"), _P_ATOM
    if t is Atom:
        return f.name, _P_ATOM
    if t is AttrCmp:
        return f"{f.attr} {f.op} {_fmt_value(f.value)}", _P_ATOM
    if t is Skip:
        return "skip", _P_ATOM
    if t is ElapsedCmp:
        return f"Tf {f.op} {_fmt_num(f.bound)}", _P_ATOM
    if t is ForAll:
        rng = "" if f.lo is None else f"[{_fmt_num(f.lo)}, {_fmt_num(f.hi)}]"
        return f"forall {f.var} in {f.attr}{rng}: {_fmt(f.body)[0]}", _P_BINDER
    if t is Let:
        return f"let {f.var} := {f.attr} in {_fmt(f.body)[0]}", _P_BINDER
    if t in _UNARY:
        text, p = _fmt(f.f)
        if p < _P_UNARY:
            text = f"({text})"
        return _UNARY[t] + text, _P_UNARY
    if t is ChopStar:
        text, p = _fmt(f.f)
        if p < _P_POST:
            text = f"({text})"
        return text + "*", _P_POST
    if t is TimedChop:
        sym = " ;[" + " & ".join(f"x {op} {_fmt_num(c)}" for op, c in f.constraint) + "] "
        prec, assoc = _P_CHOP, "right"
    else:
        sym, prec, assoc = _BINARY[t]
    lt, lp = _fmt(f.left)
    rt, rp = _fmt(f.right)
    if lp < prec or (lp == prec and assoc == "right") or lp == _P_BINDER:
        lt = f"({lt})"
    if rp < prec or (rp == prec and assoc == "left") or rp == _P_BINDER:
        rt = f"({rt})"
    return lt + sym + rt, prec


def format_formula(f: Formula) -> str:
    return _fmt(f)[0]
