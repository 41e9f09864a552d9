"""Finite behavior traces: events, traces, interval views and JSON-lines I/O."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

Value = Union[int, float, str]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")

_EVENT_FIELDS = {"t", "props", "attrs"}


class TraceError(ValueError):
    """Raised for malformed events, traces or trace files."""


class EmptyTraceError(TraceError):
    """Raised when a trace (or trace file) holds no events."""


def _check_value(key: str, value: object) -> Value:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise TraceError(f"attribute {key!r} has unsupported value {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise TraceError(f"attribute {key!r} is not finite")
    return value


@dataclass(frozen=True, eq=True)
class Event:
    t: float
    props: frozenset = frozenset()
    attrs: Mapping[str, Value] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.t, bool) or not isinstance(self.t, (int, float)):
            raise TraceError(f"timestamp must be a number, got {self.t!r}")
        if not math.isfinite(self.t) or self.t < 0:
            raise TraceError(f"timestamp must be finite and >= 0, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))
        props = frozenset(self.props)
        for p in props:
            if not isinstance(p, str) or not IDENT_RE.match(p):
                raise TraceError(f"bad proposition name {p!r}")
        object.__setattr__(self, "props", props)
        attrs = dict(self.attrs)
        for k, v in attrs.items():
            if not isinstance(k, str) or not IDENT_RE.match(k):
                raise TraceError(f"bad attribute name {k!r}")
            _check_value(k, v)
        object.__setattr__(self, "attrs", attrs)

    __hash__ = None  # attrs is a dict

    def to_json(self) -> str:
        return json.dumps(
            {"t": self.t, "props": sorted(self.props), "attrs": self.attrs},
            sort_keys=True,
            separators=(",", ":"),
        )


class Trace:
    """Immutable, non-empty sequence of events with non-decreasing timestamps."""

    __slots__ = ("_events", "_times")

    def __init__(self, events: Iterable[Event]):
        evs = tuple(events)
        if not evs:
            raise EmptyTraceError("a trace needs at least one event")
        for i in range(1, len(evs)):
            if evs[i].t < evs[i - 1].t:
                raise TraceError(
                    f"decreasing timestamp at event {i + 1} "
                    f"({evs[i - 1].t} then {evs[i].t})"
                )
        self._events = evs
        self._times = tuple(e.t for e in evs)

    @property
    def events(self) -> tuple:
        return self._events

    @property
    def times(self) -> tuple:
        return self._times

    def __len__(self) -> int:
        return len(self._events)

    def __getitem__(self, i: int) -> Event:
        return self._events[i]

    def __iter__(self):
        return iter(self._events)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trace) and self._events == other._events

    def __repr__(self) -> str:
        return f"Trace({len(self)} events)"

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self._events)


@dataclass(frozen=True)
class Interval:
    """A view [lo, hi] (inclusive) of a trace. Equality is positional."""

    trace: Trace = field(compare=False, repr=False)
    lo: int
    hi: int

    def __post_init__(self):
        n = len(self.trace)
        if not (0 <= self.lo <= self.hi < n):
            raise IndexError(f"interval [{self.lo}, {self.hi}] out of range for trace of length {n}")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def events(self) -> Sequence[Event]:
        return self.trace.events[self.lo : self.hi + 1]


def subinterval(base: Union[Trace, Interval], lo: int, hi: int) -> Interval:
    """Interval view of ``base``; indices are relative to ``base`` when it is an Interval."""
    if isinstance(base, Interval):
        if not (0 <= lo <= hi < len(base)):
            raise IndexError(f"subinterval [{lo}, {hi}] out of range for interval of length {len(base)}")
        return Interval(base.trace, base.lo + lo, base.lo + hi)
    return Interval(base, lo, hi)


def whole(trace: Trace) -> Interval:
    return Interval(trace, 0, len(trace) - 1)


def elapsed(iv: Interval) -> float:
    times = iv.trace.times
    return times[iv.hi] - times[iv.lo]


def parse_event_line(line: str, lineno: int = 1) -> Event:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceError(f"line {lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise TraceError(f"line {lineno}: expected an object")
    unknown = set(obj) - _EVENT_FIELDS
    if unknown:
        raise TraceError(f"line {lineno}: unknown field(s) {sorted(unknown)}")
    if "t" not in obj:
        raise TraceError(f"line {lineno}: missing field 't'")
    props = obj.get("props", [])
    attrs = obj.get("attrs", {})
    if not isinstance(props, list) or not isinstance(attrs, dict):
        raise TraceError(f"line {lineno}: 'props' must be an array and 'attrs' an object")
    try:
        return Event(obj["t"], frozenset(props), attrs)
    except TraceError as exc:
        raise TraceError(f"line {lineno}: {exc}") from None


def loads_trace(text: str) -> Trace:
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        ev = parse_event_line(line, lineno)
        if events and ev.t < events[-1].t:
            raise TraceError(
                f"decreasing timestamp at event {len(events) + 1} "
                f"(line {lineno}: {events[-1].t} then {ev.t})"
            )
        events.append(ev)
    if not events:
        raise EmptyTraceError("trace file holds no events")
    return Trace(events)


def load_trace(path: Union[str, Path]) -> Trace:
    return loads_trace(Path(path).read_text(encoding="utf-8"))


def dump_trace(trace: Trace, path: Union[str, Path]) -> None:
    Path(path).write_text(trace.to_jsonl(), encoding="utf-8")
