"""Evaluation engines for the four logics.

Every logic is evaluated over an inclusive index range ``[lo, hi]`` of a trace:

* Prop evaluates an event ``i`` as the point range ``[i, i]``;
* LTL evaluates position ``pos`` as the suffix ``[pos, n - 1]`` (LTL operators
  only ever move the start forward, so suffixes stay suffixes);
* ITL and RASL evaluate arbitrary sub-intervals.

Atoms and attribute comparisons read the first event of the range.  ``forall``
ranges over the attribute values seen anywhere in the range; ``let`` binds the
attribute at the first event.

Two independent implementations exist: :func:`eval_naive` recurses directly over
the full AST without memoisation and serves as the oracle, while
:class:`Evaluator` runs a compiled core form with a memo table and counts work.
"""

from __future__ import annotations

import operator
import sys
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

from .formula import (
    And,
    Atom,
    AttrCmp,
    Chop,
    ChopStar,
    Const,
    ElapsedCmp,
    Eventually,
    ForAll,
    Formula,
    Globally,
    Implies,
    Let,
    Logic,
    Next,
    Not,
    Or,
    Parallel,
    Skip,
    TimedChop,
    Until,
    Var,
    check_logic,
    expand_derived,
)
from .trace import Event, Interval, Trace

# chop-star and nested chops recurse once per split point
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

_CMP = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "=": operator.eq,
    "!=": operator.ne,
}

Scope = Union[int, Interval, Tuple[int, int]]


@dataclass(frozen=True)
class EvalStats:
    result: bool
    eval_count: int
    memo_entries: int


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def compare_values(actual, op: str, expected) -> bool:
    """Attribute comparison: mismatched types are unequal and unordered."""
    if _is_num(actual) and _is_num(expected):
        return _CMP[op](actual, expected)
    if isinstance(actual, str) and isinstance(expected, str):
        return _CMP[op](actual, expected)
    return op == "!="


def _lookup(env, name):
    for k, v in reversed(env):
        if k == name:
            return v
    return None


def _attr_cmp(event: Event, attr: str, op: str, value, env) -> bool:
    actual = event.attrs.get(attr)
    if actual is None:
        return False
    if isinstance(value, Var):
        value = _lookup(env, value.name)
        if value is None:
            return False
    return compare_values(actual, op, value)


def quantifier_domain(trace: Trace, lo: int, hi: int, attr: str, rlo=None, rhi=None) -> tuple:
    """Distinct values of ``attr`` on events lo..hi in first-seen order,
    restricted to numbers within [rlo, rhi] when a range is given."""
    seen = []
    marks = set()
    for e in trace.events[lo : hi + 1]:
        v = e.attrs.get(attr)
        if v is None:
            continue
        if rlo is not None:
            if not _is_num(v) or not (rlo <= v <= rhi):
                continue
        key = (type(v) is str, v)
        if key not in marks:
            marks.add(key)
            seen.append(v)
    return tuple(seen)


# --------------------------------------------------------------------------
# Naive oracle


def _naive(f: Formula, tr: Trace, lo: int, hi: int, env: tuple) -> bool:
    t = type(f)
    if t is Const:
        return f.value
    if t is Atom:
        return f.name in tr.events[lo].props
    if t is AttrCmp:
        return _attr_cmp(tr.events[lo], f.attr, f.op, f.value, env)
    if t is Not:
        return not _naive(f.f, tr, lo, hi, env)
    if t is And:
        return _naive(f.left, tr, lo, hi, env) and _naive(f.right, tr, lo, hi, env)
    if t is Or:
        return _naive(f.left, tr, lo, hi, env) or _naive(f.right, tr, lo, hi, env)
    if t is Implies:
        return (not _naive(f.left, tr, lo, hi, env)) or _naive(f.right, tr, lo, hi, env)
    if t is ForAll:
        dom = quantifier_domain(tr, lo, hi, f.attr, f.lo, f.hi)
        return all(_naive(f.body, tr, lo, hi, env + ((f.var, v),)) for v in dom)
    if t is Let:
        v = tr.events[lo].attrs.get(f.attr)
        if v is None:
            return False
        return _naive(f.body, tr, lo, hi, env + ((f.var, v),))
    if t is Next:
        return lo < hi and _naive(f.f, tr, lo + 1, hi, env)
    if t is Until:
        for k in range(lo, hi + 1):
            if _naive(f.right, tr, k, hi, env) and all(
                _naive(f.left, tr, j, hi, env) for j in range(lo, k)
            ):
                return True
        return False
    if t is Eventually:
        return any(_naive(f.f, tr, k, hi, env) for k in range(lo, hi + 1))
    if t is Globally:
        return all(_naive(f.f, tr, k, hi, env) for k in range(lo, hi + 1))
    if t is Chop:
        return any(
            _naive(f.left, tr, lo, k, env) and _naive(f.right, tr, k, hi, env)
            for k in range(lo, hi + 1)
        )
    if t is ChopStar:
        if lo == hi:
            return True
        return any(
            _naive(f.f, tr, lo, k, env) and _naive(f, tr, k, hi, env)
            for k in range(lo + 1, hi + 1)
        )
    if t is Parallel:
        a, b = f.left, f.right
        return (
            _naive(a, tr, lo, hi, env)
            and any(_naive(b, tr, lo, k, env) for k in range(lo, hi + 1))
        ) or (
            _naive(b, tr, lo, hi, env)
            and any(_naive(a, tr, lo, k, env) for k in range(lo, hi + 1))
        )
    if t is Skip:
        return hi == lo + 1
    if t is ElapsedCmp:
        return _CMP[f.op](tr.times[hi] - tr.times[lo], f.bound)
    if t is TimedChop:
        times = tr.times
        for k in range(lo, hi + 1):
            dt = times[k] - times[lo]
            if all(_CMP[op](dt, c) for op, c in f.constraint) and _naive(
                f.left, tr, lo, k, env
            ) and _naive(f.right, tr, k, hi, env):
                return True
        return False
    raise TypeError(f"unknown formula node {f!r}")


def scope_bounds(logic: Logic, tr: Trace, scope: Scope) -> Tuple[int, int]:
    """Map a logic-specific scope to the inclusive index range it denotes."""
    n = len(tr)
    if isinstance(scope, Interval):
        lo, hi = scope.lo, scope.hi
    elif isinstance(scope, tuple):
        lo, hi = scope
    else:
        lo = int(scope)
        hi = lo if logic == Logic.PROP else n - 1
    if not (0 <= lo <= hi < n):
        raise IndexError(f"scope [{lo}, {hi}] out of range for trace of length {n}")
    if logic == Logic.PROP and lo != hi:
        raise ValueError("propositional scope must be a single event")
    if logic == Logic.LTL and hi != n - 1:
        raise ValueError("LTL scope must be a trace suffix")
    return lo, hi


def eval_naive(f: Formula, logic: Logic, tr: Trace, scope: Scope) -> bool:
    """Reference semantics: direct recursion with exhaustive split enumeration."""
    check_logic(f, logic)
    lo, hi = scope_bounds(logic, tr, scope)
    return _naive(f, tr, lo, hi, ())


# --------------------------------------------------------------------------
# Compiled, memoised evaluator

(
    OP_CONST,
    OP_ATOM,
    OP_CMP,
    OP_NOT,
    OP_OR,
    OP_NEXT,
    OP_UNTIL,
    OP_CHOP,
    OP_STAR,
    OP_SKIP,
    OP_ELAPSED,
    OP_FORALL,
    OP_LET,
) = range(13)


class Program:
    """Core-form formula flattened into structurally interned nodes.

    ``local[i]`` marks nodes whose value depends only on the first event of the
    range; ``closed[i]`` marks nodes without free variables.  Both shrink memo keys.
    """

    __slots__ = ("ops", "args", "local", "closed", "root", "logic", "source")

    def __init__(self, f: Formula, logic: Logic):
        self.ops = []
        self.args = []
        self.local = []
        self.closed = []
        self.logic = logic
        self.source = f
        intern = {}
        self.root = self._add(expand_derived(f, logic), intern)[0]

    def __len__(self) -> int:
        return len(self.ops)

    def _emit(self, key, op, args, local, free, intern):
        idx = intern.get(key)
        if idx is None:
            idx = len(self.ops)
            intern[key] = idx
            self.ops.append(op)
            self.args.append(args)
            self.local.append(local)
            self.closed.append(not free)
        return idx, free

    def _add(self, f: Formula, intern):
        t = type(f)
        if t is Const:
            return self._emit(("c", f.value), OP_CONST, f.value, True, frozenset(), intern)
        if t is Atom:
            return self._emit(("a", f.name), OP_ATOM, f.name, True, frozenset(), intern)
        if t is AttrCmp:
            free = frozenset([f.value.name]) if isinstance(f.value, Var) else frozenset()
            key = ("=", f.attr, f.op, type(f.value).__name__, f.value)
            return self._emit(key, OP_CMP, (f.attr, f.op, f.value), True, free, intern)
        if t is Skip:
            return self._emit(("skip",), OP_SKIP, None, False, frozenset(), intern)
        if t is ElapsedCmp:
            return self._emit(("T", f.op, f.bound), OP_ELAPSED, (_CMP[f.op], f.bound), False, frozenset(), intern)
        if t is Not:
            a, fa = self._add(f.f, intern)
            return self._emit(("!", a), OP_NOT, a, self.local[a], fa, intern)
        if t is Next:
            a, fa = self._add(f.f, intern)
            return self._emit(("X", a), OP_NEXT, a, False, fa, intern)
        if t is ChopStar:
            a, fa = self._add(f.f, intern)
            return self._emit(("*", a), OP_STAR, a, False, fa, intern)
        if t in (Or, Until, Chop):
            a, fa = self._add(f.left, intern)
            b, fb = self._add(f.right, intern)
            op = {Or: OP_OR, Until: OP_UNTIL, Chop: OP_CHOP}[t]
            local = op == OP_OR and self.local[a] and self.local[b]
            return self._emit((op, a, b), op, (a, b), local, fa | fb, intern)
        if t is ForAll:
            a, fa = self._add(f.body, intern)
            key = ("A", f.var, f.attr, f.lo, f.hi, a)
            return self._emit(key, OP_FORALL, (f.var, f.attr, f.lo, f.hi, a), False, fa - {f.var}, intern)
        if t is Let:
            a, fa = self._add(f.body, intern)
            key = ("L", f.var, f.attr, a)
            return self._emit(key, OP_LET, (f.var, f.attr, a), self.local[a], fa - {f.var}, intern)
        raise TypeError(f"{t.__name__} is not a core connective")


@lru_cache(maxsize=1024)
def compile_formula(f: Formula, logic: Logic) -> Program:
    check_logic(f, logic)
    return Program(f, logic)


class Evaluator:
    """Memoised evaluation of one program over one trace.

    The memo table lives as long as the evaluator, so a detector scan that
    re-uses one evaluator across many scopes shares sub-results between them.
    """

    def __init__(self, program: Program, trace: Trace):
        self.program = program
        self.trace = trace
        self.memo = {}
        self.eval_count = 0
        self._domains = {}

    def __call__(self, lo: int, hi: int) -> bool:
        return self._ev(self.program.root, lo, hi, ())

    @property
    def memo_entries(self) -> int:
        return len(self.memo)

    def _ev(self, i: int, lo: int, hi: int, env: tuple) -> bool:
        self.eval_count += 1
        prog = self.program
        key = (i, lo, -1 if prog.local[i] else hi, () if prog.closed[i] else env)
        memo = self.memo
        r = memo.get(key)
        if r is not None:
            return r
        op = prog.ops[i]
        arg = prog.args[i]
        ev = self._ev
        if op == OP_ATOM:
            r = arg in self.trace.events[lo].props
        elif op == OP_OR:
            r = ev(arg[0], lo, hi, env) or ev(arg[1], lo, hi, env)
        elif op == OP_NOT:
            r = not ev(arg, lo, hi, env)
        elif op == OP_CHOP:
            a, b = arg
            r = False
            for k in range(lo, hi + 1):
                if ev(a, lo, k, env) and ev(b, k, hi, env):
                    r = True
                    break
        elif op == OP_STAR:
            r = lo == hi
            if not r:
                for k in range(lo + 1, hi + 1):
                    if ev(arg, lo, k, env) and ev(i, k, hi, env):
                        r = True
                        break
        elif op == OP_CONST:
            r = arg
        elif op == OP_CMP:
            r = _attr_cmp(self.trace.events[lo], arg[0], arg[1], arg[2], env)
        elif op == OP_NEXT:
            r = lo < hi and ev(arg, lo + 1, hi, env)
        elif op == OP_UNTIL:
            a, b = arg
            r = False
            for k in range(lo, hi + 1):
                if ev(b, k, hi, env):
                    r = True
                    break
                if not ev(a, k, hi, env):
                    break
        elif op == OP_SKIP:
            r = hi == lo + 1
        elif op == OP_ELAPSED:
            times = self.trace.times
            r = arg[0](times[hi] - times[lo], arg[1])
        elif op == OP_FORALL:
            var, attr, rlo, rhi, body = arg
            dkey = (attr, rlo, rhi, lo, hi)
            dom = self._domains.get(dkey)
            if dom is None:
                dom = self._domains[dkey] = quantifier_domain(self.trace, lo, hi, attr, rlo, rhi)
            r = True
            for v in dom:
                if not ev(body, lo, hi, env + ((var, v),)):
                    r = False
                    break
        elif op == OP_LET:
            var, attr, body = arg
            v = self.trace.events[lo].attrs.get(attr)
            r = v is not None and ev(body, lo, hi, env + ((var, v),))
        else:  # pragma: no cover - compile() only emits the codes above
            raise AssertionError(op)
        memo[key] = r
        return r


def _run(f: Formula, logic: Logic, tr: Trace, scope: Scope) -> Evaluator:
    lo, hi = scope_bounds(logic, tr, scope)
    ev = Evaluator(compile_formula(f, logic), tr)
    ev.result = ev(lo, hi)
    return ev


def eval_stats(f: Formula, logic: Logic, tr: Trace, scope: Scope) -> EvalStats:
    ev = _run(f, logic, tr, scope)
    return EvalStats(ev.result, ev.eval_count, ev.memo_entries)


def eval_prop(f: Formula, e: Union[Event, Trace], pos: int = 0) -> bool:
    tr = e if isinstance(e, Trace) else Trace([e])
    return _run(f, Logic.PROP, tr, pos).result


def eval_ltl(f: Formula, tr: Trace, pos: int = 0) -> bool:
    return _run(f, Logic.LTL, tr, pos).result


def eval_itl(f: Formula, iv: Interval) -> bool:
    return _run(f, Logic.ITL, iv.trace, iv).result


def eval_rasl(f: Formula, iv: Interval) -> bool:
    return _run(f, Logic.RASL, iv.trace, iv).result


def evaluate(f: Formula, logic: Logic, tr: Trace, scope: Scope) -> bool:
    """Memoised evaluation dispatched on ``logic``."""
    return _run(f, logic, tr, scope).result
