"""Object-centric event logs and the process executions extracted from them."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InputError

logger = logging.getLogger(__name__)

_LOG_KEYS = {"objects", "events"}
_OBJECT_KEYS = {"id", "type"}
_EVENT_KEYS = {"id", "activity", "timestamp", "objects"}


@dataclass(frozen=True)
class Event:
    id: str
    activity: str
    timestamp: int
    objects: frozenset[str]


@dataclass(frozen=True)
class EventLog:
    """Events, typed objects, and the activity/object/time maps over them.

    ``events`` maps event id to :class:`Event`; ``object_types`` maps every
    object id to its (single) type.
    """

    events: Mapping[str, Event]
    object_types: Mapping[str, str]

    def __post_init__(self):
        for ev in self.events.values():
            if not ev.objects:
                raise InputError(f"event without objects: {ev.id!r}")
            missing = ev.objects - self.object_types.keys()
            if missing:
                raise InputError(f"event {ev.id!r} references untyped objects {sorted(missing)}")

    @property
    def objects(self) -> frozenset[str]:
        return frozenset(self.object_types)

    @property
    def types(self) -> frozenset[str]:
        return frozenset(self.object_types.values())

    def activity(self, e: str) -> str:
        return self.events[e].activity


@dataclass(frozen=True)
class ObjectGraph:
    nodes: frozenset[str]
    edges: frozenset[frozenset[str]]


@dataclass(frozen=True)
class ProcessExecution:
    """A connected component of the object graph with its event DAG.

    The execution is self-contained: it carries the events it covers and the
    types of its objects so that later stages never need the original log.
    """

    objects: frozenset[str]
    object_types: Mapping[str, str]
    events: Mapping[str, Event]
    edges: frozenset[tuple[str, str]]
    traces: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self.events)

    def successors(self, e: str) -> list[str]:
        return sorted(b for a, b in self.edges if a == e)

    def label(self) -> str:
        return ",".join(sorted(self.objects))


def _strict_keys(kind: str, entry: Mapping, allowed: set[str], strict: bool) -> None:
    extra = set(entry) - allowed
    if not extra:
        return
    if strict:
        raise InputError(f"unknown fields in {kind}: {sorted(extra)}")
    logger.warning("ignoring unknown fields in %s: %s", kind, sorted(extra))


def parse_event_log(raw: bytes | str, *, strict: bool = False) -> EventLog:
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"event log is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not {"objects", "events"} <= doc.keys():
        raise InputError("event log must be an object with 'objects' and 'events'")
    _strict_keys("log", doc, _LOG_KEYS, strict)

    object_types: dict[str, str] = {}
    for entry in doc["objects"]:
        if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
            raise InputError(f"malformed object entry: {entry!r}")
        if not isinstance(entry.get("type"), str):
            raise InputError(f"object without a type: {entry.get('id')!r}")
        _strict_keys("object", entry, _OBJECT_KEYS, strict)
        if entry["id"] in object_types:
            raise InputError(f"duplicate object id {entry['id']!r}")
        object_types[entry["id"]] = entry["type"]

    events: dict[str, Event] = {}
    for entry in doc["events"]:
        if not isinstance(entry, dict):
            raise InputError(f"malformed event entry: {entry!r}")
        _strict_keys("event", entry, _EVENT_KEYS, strict)
        eid = entry.get("id")
        act = entry.get("activity")
        ts = entry.get("timestamp")
        objs = entry.get("objects")
        if not isinstance(eid, str) or not isinstance(act, str):
            raise InputError(f"event needs string 'id' and 'activity': {entry!r}")
        if not isinstance(ts, int) or isinstance(ts, bool):
            raise InputError(f"event {eid!r} needs an integer timestamp")
        if not isinstance(objs, list) or not all(isinstance(o, str) for o in objs):
            raise InputError(f"event {eid!r} needs a list of object ids")
        if not objs:
            raise InputError(f"event without objects: {eid!r}")
        if len(set(objs)) != len(objs):
            raise InputError(f"event {eid!r} references an object twice")
        if eid in events:
            raise InputError(f"duplicate event id {eid!r}")
        for o in objs:
            if o not in object_types:
                raise InputError(f"object without a type: {o!r} (event {eid!r})")
        events[eid] = Event(eid, act, ts, frozenset(objs))
    return EventLog(events, object_types)


def serialize_event_log(log: EventLog) -> str:
    doc = {
        "objects": [{"id": o, "type": log.object_types[o]} for o in sorted(log.object_types)],
        "events": [
            {
                "id": ev.id,
                "activity": ev.activity,
                "timestamp": ev.timestamp,
                "objects": sorted(ev.objects),
            }
            for ev in sorted(log.events.values(), key=lambda ev: (ev.timestamp, ev.id))
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def _trace(events: Iterable[Event], o: str) -> tuple[str, ...]:
    mine = [ev for ev in events if o in ev.objects]
    # ties on timestamp fall back to the event id
    mine.sort(key=lambda ev: (ev.timestamp, ev.id))
    return tuple(ev.id for ev in mine)


def trace_of(log: EventLog, o: str) -> tuple[str, ...]:
    if o not in log.object_types:
        raise KeyError(f"unknown object {o!r}")
    return _trace(log.events.values(), o)


def build_object_graph(log: EventLog) -> ObjectGraph:
    edges = set()
    for ev in log.events.values():
        objs = sorted(ev.objects)
        for i, a in enumerate(objs):
            for b in objs[i + 1:]:
                edges.add(frozenset((a, b)))
    return ObjectGraph(log.objects, frozenset(edges))


def _components(graph: ObjectGraph) -> list[frozenset[str]]:
    adj: dict[str, set[str]] = {o: set() for o in graph.nodes}
    for edge in graph.edges:
        a, b = tuple(edge)
        adj[a].add(b)
        adj[b].add(a)
    seen: set[str] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack, comp = [start], set()
        seen.add(start)
        while stack:
            o = stack.pop()
            comp.add(o)
            for n in adj[o] - seen:
                seen.add(n)
                stack.append(n)
        comps.append(frozenset(comp))
    return comps


def execution_for(log: EventLog, objects: Iterable[str]) -> ProcessExecution:
    X = frozenset(objects)
    events = {eid: ev for eid, ev in log.events.items() if ev.objects & X}
    traces = {o: _trace(events.values(), o) for o in sorted(X)}
    edges = set()
    for tr in traces.values():
        edges.update(zip(tr, tr[1:]))
    return ProcessExecution(
        objects=X,
        object_types={o: log.object_types[o] for o in X},
        events=events,
        edges=frozenset(edges),
        traces=traces,
    )


def extract_process_executions(log: EventLog) -> list[ProcessExecution]:
    """One execution per connected component of the object graph.

    The list is ordered by the smallest object id of each component, which
    gives executions a stable index for the CLI.
    """
    comps = sorted(_components(build_object_graph(log)), key=lambda c: min(c))
    return [execution_for(log, comp) for comp in comps]


def validate_execution_dag(px: ProcessExecution) -> list[str]:
    """Return a list of violations; an empty list means the DAG is sound."""
    problems = []
    for a, b in sorted(px.edges):
        if a not in px.events or b not in px.events:
            problems.append(f"edge ({a}, {b}) references an unknown event")
            continue
        shared = px.events[a].objects & px.events[b].objects & px.objects
        justified = any(
            (a, b) in zip(px.traces.get(o, ()), px.traces.get(o, ())[1:]) for o in shared
        )
        if not justified:
            problems.append(f"unjustified edge ({a}, {b}): not a directly-follows pair of a shared object")
    for eid, ev in sorted(px.events.items()):
        if not ev.objects & px.objects:
            problems.append(f"event {eid} touches no object of the execution")

    # Kahn's algorithm; leftovers lie on a cycle
    indeg = {e: 0 for e in px.events}
    succ: dict[str, list[str]] = {e: [] for e in px.events}
    for a, b in px.edges:
        if a in indeg and b in indeg:
            indeg[b] += 1
            succ[a].append(b)
    ready = [e for e, d in indeg.items() if d == 0]
    done = 0
    while ready:
        e = ready.pop()
        done += 1
        for n in succ[e]:
            indeg[n] -= 1
            if indeg[n] == 0:
                ready.append(n)
    if done != len(indeg):
        cyc = sorted(e for e, d in indeg.items() if d > 0)
        problems.append(f"cycle among events {cyc}")
    return problems
