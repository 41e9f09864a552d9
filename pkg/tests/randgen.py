"""Seeded random formulas and traces for oracle-equivalence checks."""

from __future__ import annotations

import random

from mcids.formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    AttrCmp,
    Chop,
    ChopStar,
    ElapsedCmp,
    Eventually,
    ForAll,
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
)
from mcids.trace import Event, Trace

PROPS = ("p", "q", "r")
OPS = ("<", "<=", ">", ">=", "=", "!=")
BOUNDS = (0.0, 0.5, 1.0, 1.5, 3.0)


def random_trace(rng: random.Random, max_len: int = 8) -> Trace:
    n = rng.randint(1, max_len)
    t = 0.0
    events = []
    for _ in range(n):
        t += rng.choice((0.0, 0.5, 1.0, 2.0))
        props = {p for p in PROPS if rng.random() < 0.45}
        attrs = {}
        if rng.random() < 0.8:
            attrs["a"] = rng.randint(0, 3)
        if rng.random() < 0.5:
            attrs["s"] = rng.choice(("x", "y"))
        if rng.random() < 0.2:
            attrs["m"] = rng.choice((1, "1"))
        events.append(Event(t, frozenset(props), attrs))
    return Trace(events)


def _leaf(rng: random.Random, logic: Logic, bound: tuple):
    roll = rng.random()
    if roll < 0.45:
        return Atom(rng.choice(PROPS))
    if roll < 0.55:
        return rng.choice((TRUE, FALSE))
    if roll < 0.75 or (roll < 0.85 and logic < Logic.RASL):
        attr = rng.choice(("a", "a", "s", "m", "absent"))
        if bound and rng.random() < 0.5:
            return AttrCmp(attr, rng.choice(OPS), Var(rng.choice(bound)))
        value = rng.choice((0, 1, 2, 3, 1.5, "x", "y", "1"))
        return AttrCmp(attr, rng.choice(OPS), value)
    if logic >= Logic.RASL:
        if rng.random() < 0.4:
            return Skip()
        return ElapsedCmp(rng.choice(OPS[:4]), rng.choice(BOUNDS))
    return Atom(rng.choice(PROPS))


def random_formula(rng: random.Random, logic: Logic, depth: int = 4, bound: tuple = ()):
    """A formula of the given logic whose AST depth is at most ``depth``."""
    if depth <= 1 or rng.random() < 0.2:
        return _leaf(rng, logic, bound)
    unary = [Not]
    binary = [And, Or, Implies]
    if logic >= Logic.LTL:
        unary += [Next, Eventually, Globally]
        binary += [Until]
    if logic >= Logic.ITL:
        unary += [ChopStar]
        binary += [Chop, Chop, Parallel]
    if logic >= Logic.RASL:
        binary += [TimedChop, TimedChop]
    roll = rng.random()
    sub = depth - 1
    if roll < 0.08 and len(bound) < 2:
        var = f"v{len(bound)}"
        body = random_formula(rng, logic, sub, bound + (var,))
        if rng.random() < 0.5:
            return Let(var, rng.choice(("a", "s")), body)
        if rng.random() < 0.5:
            return ForAll(var, "a", body, 1, 2)
        return ForAll(var, rng.choice(("a", "s")), body)
    if roll < 0.4:
        return rng.choice(unary)(random_formula(rng, logic, sub, bound))
    cls = rng.choice(binary)
    left = random_formula(rng, logic, sub, bound)
    right = random_formula(rng, logic, sub, bound)
    if cls is TimedChop:
        k = rng.randint(1, 2)
        constraint = tuple((rng.choice(OPS[:4]), rng.choice(BOUNDS)) for _ in range(k))
        return TimedChop(left, constraint, right)
    return cls(left, right)


def random_scope(rng: random.Random, logic: Logic, trace: Trace):
    n = len(trace)
    if logic <= Logic.LTL:
        return rng.randrange(n)
    lo = rng.randrange(n)
    return (lo, rng.randrange(lo, n))


def random_cases(seed: int, logic: Logic, count: int, max_len: int = 8, depth: int = 4):
    rng = random.Random(f"{seed}:{int(logic)}")
    for _ in range(count):
        tr = random_trace(rng, max_len)
        f = random_formula(rng, logic, depth)
        yield f, tr, random_scope(rng, logic, tr)
