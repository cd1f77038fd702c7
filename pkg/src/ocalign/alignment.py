"""Moves, alignment graphs, their log/model reductions, validity and cost."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple

import networkx as nx

from .errors import BindingNotEnabled, InputError
from .log import ProcessExecution
from .petri import AcceptingNet, Binding, Marking, fire


class MoveKind(str, Enum):
    LOG = "log"
    MODEL = "model"
    SYNC = "sync"


class Cost(NamedTuple):
    """Visible deviation units first, silent model steps second."""

    visible: int = 0
    silent: int = 0

    def __add__(self, other: "Cost") -> "Cost":  # type: ignore[override]
        return Cost(self.visible + other.visible, self.silent + other.silent)

    def to_dict(self) -> dict:
        return {"visible": self.visible, "silent": self.silent}


@dataclass(frozen=True)
class Move:
    """One alignment step. A skipped side is ``None`` with an empty object set.

    ``model_label`` is the activity of ``model_transition`` (``None`` when the
    transition is silent); ``event`` records the originating event for log
    and synchronous moves.
    """

    id: str
    kind: MoveKind
    log_activity: str | None = None
    log_objects: frozenset[str] = frozenset()
    model_transition: str | None = None
    model_label: str | None = None
    model_objects: frozenset[str] = frozenset()
    event: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "log_objects", frozenset(self.log_objects))
        object.__setattr__(self, "model_objects", frozenset(self.model_objects))
        k = self.kind
        if k is MoveKind.LOG:
            ok = self.log_activity is not None and self.model_transition is None and not self.model_objects
        elif k is MoveKind.MODEL:
            ok = self.log_activity is None and self.model_transition is not None and not self.log_objects
        elif k is MoveKind.SYNC:
            ok = (
                self.log_activity is not None
                and self.model_transition is not None
                and self.log_activity == self.model_label
                and self.log_objects == self.model_objects
            )
        else:
            ok = False
        if not ok:
            raise InputError(f"malformed {k} move {self.id!r}")

    @property
    def has_log(self) -> bool:
        return self.kind is not MoveKind.MODEL

    @property
    def has_model(self) -> bool:
        return self.kind is not MoveKind.LOG

    @property
    def is_silent(self) -> bool:
        return self.kind is MoveKind.MODEL and self.model_label is None

    def __str__(self) -> str:
        top = f"{self.log_activity}{sorted(self.log_objects)}" if self.has_log else ">>"
        bottom = f"{self.model_label or 'tau'}{sorted(self.model_objects)}" if self.has_model else ">>"
        return f"{self.id}:{top}|{bottom}"


@dataclass(frozen=True)
class AlignmentGraph:
    moves: tuple[Move, ...]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        ids = [m.id for m in self.moves]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate move ids")
        known = set(ids)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise InputError(f"edge ({a}, {b}) references an unknown move")

    def move(self, mid: str) -> Move:
        return self.by_id()[mid]

    def by_id(self) -> dict[str, Move]:
        return {m.id: m for m in self.moves}

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(m.id for m in self.moves)
        g.add_edges_from(self.edges)
        return g

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())


def move_cost(m: Move) -> Cost:
    if m.kind is MoveKind.SYNC:
        return Cost(0, 0)
    if m.is_silent:
        return Cost(0, 1)
    return Cost(len(m.log_objects | m.model_objects), 0)


def alignment_cost(g: AlignmentGraph) -> Cost:
    total = Cost()
    for m in g.moves:
        total = total + move_cost(m)
    return total


def _reduce(g: AlignmentGraph, keep) -> AlignmentGraph:
    succ: dict[str, list[str]] = {m.id: [] for m in g.moves}
    for a, b in g.edges:
        succ[a].append(b)
    kept = {m.id for m in g.moves if keep(m)}
    edges = set()
    for start in kept:
        stack = list(succ[start])
        seen = set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if n in kept:
                edges.add((start, n))
            else:
                stack.extend(succ[n])
    return AlignmentGraph(tuple(m for m in g.moves if m.id in kept), frozenset(edges))


def reduce_log(g: AlignmentGraph) -> AlignmentGraph:
    return _reduce(g, lambda m: m.has_log)


def reduce_model(g: AlignmentGraph) -> AlignmentGraph:
    return _reduce(g, lambda m: m.has_model)


def move_binding(m: Move, dj: AcceptingNet, object_types) -> Binding:
    t = m.model_transition
    if t not in dj.net.transitions:
        raise InputError(f"move {m.id} uses unknown transition {t!r}")
    tpl = dj.net.tpl(t)
    bmap: dict[str, set[str]] = {ot: set() for ot in tpl}
    for o in m.model_objects:
        ot = object_types.get(o)
        if ot not in bmap:
            raise InputError(f"move {m.id} binds {o!r} of a type not adjacent to {t!r}")
        bmap[ot].add(o)
    return Binding.of(t, bmap)


def find_linearization(
    moves: list[Move], edges: Iterable[tuple[str, str]], dj: AcceptingNet, object_types, *, cap: int = 200_000
) -> list[Move] | None:
    """A topological order of ``moves`` whose bindings replay to the final marking.

    Depth-first over sets of already placed moves. The marking reached after
    a set of moves does not depend on their order, so failed sets are
    memoised. Returns None when no order works or ``cap`` sets were explored.
    """
    preds: dict[str, set[str]] = {m.id: set() for m in moves}
    for a, b in edges:
        preds[b].add(a)
    bindings = {m.id: move_binding(m, dj, object_types) for m in moves}
    order = sorted(moves, key=lambda m: m.id)
    failed: set[frozenset[str]] = set()
    budget = [cap]

    def dfs(done: frozenset[str], marking: Marking, path: list[Move]) -> list[Move] | None:
        if len(done) == len(moves):
            return list(path) if marking == dj.final else None
        if done in failed or budget[0] <= 0:
            return None
        budget[0] -= 1
        for m in order:
            if m.id in done or not preds[m.id] <= done:
                continue
            try:
                nxt = fire(dj.net, marking, bindings[m.id])
            except BindingNotEnabled:
                continue
            path.append(m)
            found = dfs(done | {m.id}, nxt, path)
            if found is not None:
                return found
            path.pop()
        failed.add(done)
        return None

    return dfs(frozenset(), dj.initial, [])


def validate_alignment(px: ProcessExecution, an: AcceptingNet, g: AlignmentGraph, *, cap: int = 200_000) -> list[str]:
    """Check both alignment clauses; returns the list of violations.

    Model moves refer to transitions of the net after variable-arc expansion
    for the execution's objects, so ``an`` is expanded here the same way the
    engine expands it.
    """
    from .product import expand_variable_arcs

    problems = []
    if not g.is_acyclic():
        return ["alignment graph has a cycle"]

    log_part = reduce_log(g)
    pxg = nx.DiGraph()
    for eid, ev in px.events.items():
        pxg.add_node(eid, act=ev.activity, objs=ev.objects)
    pxg.add_edges_from(px.edges)
    alg = nx.DiGraph()
    for m in log_part.moves:
        alg.add_node(m.id, act=m.log_activity, objs=m.log_objects)
    alg.add_edges_from(log_part.edges)
    same = lambda a, b: a["act"] == b["act"] and a["objs"] == b["objs"]  # noqa: E731
    if not nx.is_isomorphic(pxg, alg, node_match=same):
        problems.append("log part not isomorphic to the process execution")

    dj = expand_variable_arcs(an, px, min_variable_count=0)
    model_part = reduce_model(g)
    for m in model_part.moves:
        if m.model_transition not in dj.net.transitions:
            problems.append(f"model part not in language: move {m.id} uses unknown transition {m.model_transition!r}")
            return problems
        if m.kind is MoveKind.SYNC and dj.net.label(m.model_transition) != m.log_activity:
            problems.append(f"sync move {m.id} pairs {m.log_activity!r} with a transition labelled otherwise")
    try:
        lin = find_linearization(list(model_part.moves), model_part.edges, dj, px.object_types, cap=cap)
    except InputError as exc:
        problems.append(f"model part not in language: {exc}")
        return problems
    if lin is None:
        problems.append("model part not in language: no linearization replays to the final marking")
    return problems


def alignment_to_dict(g: AlignmentGraph) -> dict:
    cost = alignment_cost(g)
    return {
        "moves": [
            {
                "id": m.id,
                "kind": m.kind.value,
                "log_activity": m.log_activity,
                "log_objects": sorted(m.log_objects),
                "model_transition": m.model_transition,
                "model_label": m.model_label,
                "model_objects": sorted(m.model_objects),
                "event": m.event,
            }
            for m in g.moves
        ],
        "edges": [list(e) for e in sorted(g.edges, key=lambda e: (_id_key(e[0]), _id_key(e[1])))],
        "cost": cost.to_dict(),
    }


def _id_key(mid: str):
    digits = "".join(ch for ch in mid if ch.isdigit())
    return (int(digits) if digits else -1, mid)


def alignment_from_dict(doc: dict) -> AlignmentGraph:
    try:
        moves = tuple(
            Move(
                id=m["id"],
                kind=MoveKind(m["kind"]),
                log_activity=m.get("log_activity"),
                log_objects=frozenset(m.get("log_objects", [])),
                model_transition=m.get("model_transition"),
                model_label=m.get("model_label"),
                model_objects=frozenset(m.get("model_objects", [])),
                event=m.get("event"),
            )
            for m in doc["moves"]
        )
        edges = frozenset((a, b) for a, b in doc.get("edges", []))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"alignment does not follow the schema: {exc}") from exc
    return AlignmentGraph(moves, edges)


def dumps_alignment(g: AlignmentGraph) -> str:
    return json.dumps(alignment_to_dict(g), indent=2)
