"""Apply one signature encoding to one record under a per-logic scan policy.

Scan order and scopes:

* Prop -- every event ``i`` (scope ``[i, i]``), ascending;
* LTL  -- every suffix position ``i`` (scope ``[i, n-1]``), ascending;
* ITL / RASL -- every sub-interval ordered by ``lo`` then ``hi``.  When the
  encoding contains a temporal connective, only intervals of two or more events
  are scanned: a chop-star is trivially true on a single event, so point
  intervals would otherwise flood the detector with vacuous matches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

from .formula import Formula, Logic, check_logic, is_temporal
from .semantics import EvalStats, Evaluator, _naive, compile_formula
from .trace import Trace

Witness = Union[int, Tuple[int, int]]


@dataclass(frozen=True)
class DetectionResult:
    detected: bool
    witness: Optional[Witness]
    stats: EvalStats
    scopes: int = 0

    def describe(self) -> str:
        if not self.detected:
            return "not detected"
        if isinstance(self.witness, tuple):
            return f"detected, witness interval [{self.witness[0]}, {self.witness[1]}]"
        return f"detected, witness event {self.witness}"


def _trace_of(rec) -> Trace:
    return rec if isinstance(rec, Trace) else rec.trace


def scan_scopes(n: int, logic: Logic, temporal: bool) -> Iterator[Tuple[int, int]]:
    if logic == Logic.PROP:
        for i in range(n):
            yield i, i
    elif logic == Logic.LTL:
        for i in range(n):
            yield i, n - 1
    else:
        min_len = 1 if temporal else 0
        for lo in range(n):
            for hi in range(lo + min_len, n):
                yield lo, hi


def witness_scope(witness: Witness, logic: Logic, n: int) -> Tuple[int, int]:
    if isinstance(witness, tuple):
        return witness
    return (witness, witness) if logic == Logic.PROP else (witness, n - 1)


def detect(
    rec,
    enc: Formula,
    logic: Logic,
    short_circuit: bool = True,
    oracle: bool = False,
) -> DetectionResult:
    """Scan ``rec`` (a Record or Trace) with ``enc`` at ``logic``.

    ``short_circuit=False`` keeps scanning after the first hit so costs are
    comparable across records; the verdict and witness are unchanged.
    ``oracle=True`` uses the unmemoised reference evaluator (stats then count
    scopes only).
    """
    logic = Logic(logic)
    tr = _trace_of(rec)
    n = len(tr)
    temporal = is_temporal(enc)
    witness = None
    scopes = 0
    if oracle:
        check_logic(enc, logic)
        for lo, hi in scan_scopes(n, logic, temporal):
            scopes += 1
            if _naive(enc, tr, lo, hi, ()):
                if witness is None:
                    witness = (lo, hi)
                if short_circuit:
                    break
        stats = EvalStats(witness is not None, scopes, 0)
    else:
        ev = Evaluator(compile_formula(enc, logic), tr)
        for lo, hi in scan_scopes(n, logic, temporal):
            scopes += 1
            if ev(lo, hi):
                if witness is None:
                    witness = (lo, hi)
                if short_circuit:
                    break
        stats = EvalStats(witness is not None, ev.eval_count, ev.memo_entries)
    if witness is not None and logic <= Logic.LTL:
        witness = witness[0]
    return DetectionResult(witness is not None, witness, stats, scopes)


def scan_stats(rec, enc: Formula, logic: Logic, short_circuit: bool = False) -> EvalStats:
    return detect(rec, enc, logic, short_circuit=short_circuit).stats


def verify_witness(rec, enc: Formula, logic: Logic, witness: Witness) -> bool:
    """Re-check a reported witness with the reference evaluator."""
    tr = _trace_of(rec)
    lo, hi = witness_scope(witness, Logic(logic), len(tr))
    return _naive(enc, tr, lo, hi, ())
