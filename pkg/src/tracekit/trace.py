"""Raw execution traces, last-occurrence finalization, and the trace
JSONL wire format.

A raw trace is an ordered list of events: a ``param`` event at each
user-defined function entry (parameters only) and a ``line`` event after
each executed source line (all variables in scope). Finalization keeps,
per line, the snapshot of the highest-step event at that line.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .errors import MalformedTrace, SchemaError
from .values import RuntimeValue, parse_value, print_value


@dataclass
class TraceEvent:
    step: int
    kind: str  # "line" | "param"
    line: int
    function: str
    vars: dict[str, RuntimeValue]


@dataclass
class RawTrace:
    events: list[TraceEvent] = field(default_factory=list)
    error: str | None = None
    error_message: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class FinalizedStates:
    states: dict[int, dict[str, RuntimeValue]]
    covered: set[int]


def _check_steps(trace: RawTrace) -> None:
    prev = None
    for ev in trace.events:
        if prev is not None and ev.step <= prev:
            raise MalformedTrace(
                f"non-monotone step ids: {ev.step} after {prev}"
            )
        prev = ev.step


def finalize(trace: RawTrace) -> FinalizedStates:
    """Per-line program states from the last event at each line."""
    _check_steps(trace)
    best: dict[int, TraceEvent] = {}
    for ev in trace.events:
        cur = best.get(ev.line)
        if cur is None or ev.step > cur.step:
            best[ev.line] = ev
    states = {line: dict(ev.vars) for line, ev in best.items()}
    return FinalizedStates(states=states, covered=set(best))


def covered_lines(trace: RawTrace) -> set[int]:
    return {ev.line for ev in trace.events}


def event_to_record(ev: TraceEvent) -> dict:
    return {
        "step": ev.step,
        "kind": ev.kind,
        "line": ev.line,
        "func": ev.function,
        "vars": {
            name: {"type": val.static_type, "value": print_value(val)}
            for name, val in ev.vars.items()
        },
    }


def event_from_record(rec: dict, line_number: int | None = None) -> TraceEvent:
    for key in ("step", "kind", "line", "func", "vars"):
        if key not in rec:
            raise SchemaError(f"trace record missing {key!r} field", line_number)
    if rec["kind"] not in ("line", "param"):
        raise SchemaError(f"unknown event kind {rec['kind']!r}", line_number)
    vars_map: dict[str, RuntimeValue] = {}
    for name, spec in rec["vars"].items():
        if not isinstance(spec, dict) or "type" not in spec or "value" not in spec:
            raise SchemaError(f"variable {name!r} missing type/value", line_number)
        try:
            vars_map[name] = parse_value(spec["type"], spec["value"])
        except ValueError as exc:
            raise SchemaError(f"variable {name!r}: {exc}", line_number) from exc
    return TraceEvent(int(rec["step"]), rec["kind"], int(rec["line"]), rec["func"], vars_map)


def export_trace(trace: RawTrace, fp: io.TextIOBase) -> None:
    """Write events as JSONL, one event per line, keys sorted."""
    for ev in trace.events:
        fp.write(json.dumps(event_to_record(ev), sort_keys=True))
        fp.write("\n")


def export_trace_to_path(trace: RawTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        export_trace(trace, fp)


def ingest_trace(path) -> RawTrace:
    """Read a trace JSONL file produced here or by an external logger."""
    events = []
    with open(path, "r", encoding="utf-8") as fp:
        for i, raw in enumerate(fp, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}", i) from exc
            events.append(event_from_record(rec, i))
    trace = RawTrace(events=events)
    _check_steps(trace)
    return trace
