"""Flatten-and-align baseline and a contradiction report over per-object views."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .alignment import AlignmentGraph, Move, MoveKind
from .errors import InputError
from .log import Event, ProcessExecution
from .petri import AcceptingNet, Marking, ObjectCentricPetriNet
from .search import AlignmentResult, align_execution


def project_net(an: AcceptingNet, object_type: str) -> AcceptingNet:
    """Sub-net of one type; variable arcs become ordinary weight-1 arcs."""
    net = an.net
    places = {p: ty for p, ty in net.places.items() if ty == object_type}
    if not places:
        raise InputError(f"net has no places of type {object_type!r}")
    transitions = {t: lab for t, lab in net.transitions.items() if net.pl(t) & places.keys()}
    arcs = {}
    for (src, tgt), w in net.arcs.items():
        if (src in places and tgt in transitions) or (src in transitions and tgt in places):
            arcs[(src, tgt)] = 1 if net.variable_arcs.get((src, tgt)) else w
    keep = lambda m: Marking.of({(p, o): n for p, o, n in m.items if p in places})  # noqa: E731
    return AcceptingNet(ObjectCentricPetriNet(places, transitions, arcs, {}), keep(an.initial), keep(an.final))


def flatten_execution(px: ProcessExecution, o: str) -> ProcessExecution:
    trace = px.traces[o]
    events = {e: Event(e, px.events[e].activity, px.events[e].timestamp, frozenset([o])) for e in trace}
    return ProcessExecution(
        objects=frozenset([o]),
        object_types={o: px.object_types[o]},
        events=events,
        edges=frozenset(zip(trace, trace[1:])),
        traces={o: trace},
    )


def object_views(g: AlignmentGraph) -> dict[str, list[Move]]:
    views: dict[str, list[Move]] = {}
    for m in g.moves:
        for o in m.log_objects | m.model_objects:
            views.setdefault(o, []).append(m)
    return views


def _shared_labels(an: AcceptingNet) -> dict[str, set[str]]:
    """Activities touching several types, with the types every such transition touches."""
    net = an.net
    by_label: dict[str, list[set[str]]] = {}
    for t, lab in net.transitions.items():
        if lab is not None:
            by_label.setdefault(lab, []).append(net.tpl(t))
    return {lab: set.intersection(*tpls) for lab, tpls in by_label.items() if len(set.union(*tpls)) > 1}


def contradictions(views: Mapping[str, list[Move]], px: ProcessExecution, an: AcceptingNet) -> list[str]:
    """Places where per-object alignments cannot belong to one joint run.

    Three checks: a shared event synchronised for some of its objects but a
    log move for others; an activity shared by several types that one object
    executes on the model side while another only has it as a log move; and
    objects that must all take part in a shared activity executing it a
    different number of times on the model side.
    """
    report = []
    for eid in sorted(px.events):
        objs = sorted(px.events[eid].objects & px.objects)
        if len(objs) < 2:
            continue
        treatment = {}
        for o in objs:
            kinds = {m.kind for m in views.get(o, []) if m.event == eid}
            treatment[o] = "sync" if MoveKind.SYNC in kinds else "log" if MoveKind.LOG in kinds else "missing"
        if len(set(treatment.values())) > 1:
            detail = ", ".join(f"{o}: {k}" for o, k in sorted(treatment.items()))
            report.append(f"event {eid} ({px.events[eid].activity}) is treated differently per object ({detail})")

    shared = _shared_labels(an)
    model_counts: dict[str, dict[str, int]] = {}
    log_only: dict[str, set[str]] = {}
    for o in sorted(px.objects):
        moves = views.get(o, [])
        counts: dict[str, int] = {}
        for m in moves:
            if m.has_model and m.model_label is not None:
                counts[m.model_label] = counts.get(m.model_label, 0) + 1
        model_counts[o] = counts
        log_only[o] = {m.log_activity for m in moves if m.kind is MoveKind.LOG} - set(counts)

    for lab in sorted(shared):
        doers = [o for o in sorted(px.objects) if model_counts[o].get(lab)]
        skippers = [o for o in sorted(px.objects) if lab in log_only[o]]
        if doers and skippers:
            report.append(f"{lab!r} is executed by the model for {doers} but only logged for {skippers}")
        must = [o for o in sorted(px.objects) if px.object_types[o] in shared[lab]]
        seen = {o: model_counts[o].get(lab, 0) for o in must}
        if len(set(seen.values())) > 1:
            detail = ", ".join(f"{o}: {n}" for o, n in seen.items())
            report.append(f"model parts disagree on how often {lab!r} happens ({detail})")
    return report


@dataclass
class FlattenResult:
    per_object: dict[str, AlignmentResult]
    contradictions: list[str]

    @property
    def visible_cost(self) -> int:
        return sum(r.cost.visible for r in self.per_object.values())


def flatten_align(px: ProcessExecution, an: AcceptingNet, **search_kwargs) -> FlattenResult:
    """Align every object on its own against the sub-net of its type."""
    per_object = {}
    views = {}
    for o in sorted(px.objects):
        sub = project_net(an, px.object_types[o])
        res = align_execution(flatten_execution(px, o), sub, **search_kwargs)
        per_object[o] = res
        views[o] = list(res.alignment.moves)
    return FlattenResult(per_object, contradictions(views, px, an))
