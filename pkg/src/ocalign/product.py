"""Synchronous product construction: execution net, de-jure expansion, product."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Mapping

from .alignment import Move, MoveKind
from .errors import InputError, ResourceLimitExceeded
from .log import ProcessExecution
from .petri import (
    DEFAULT_BINDING_CAP,
    AcceptingNet,
    Binding,
    Marking,
    ObjectCentricPetriNet,
    enabled_bindings,
    net_to_dict,
)

logger = logging.getLogger(__name__)

DEFAULT_EXPANSION_CAP = 100_000
SKIP = ">>"


@dataclass(frozen=True)
class RenamingMaps:
    new_obj: Mapping[str, str]
    new_type: Mapping[str, str]
    orob: Mapping[str, str]
    orty: Mapping[str, str]


def _identifiers(px: ProcessExecution, an: AcceptingNet | None) -> set[str]:
    ids = set(px.objects) | set(px.events) | set(px.object_types.values())
    if an is not None:
        ids |= set(an.net.places) | set(an.net.transitions) | an.net.types
        ids |= an.initial.objects() | an.final.objects()
    return ids


def generate_fresh_ids(px: ProcessExecution, an: AcceptingNet | None = None) -> RenamingMaps:
    """Fresh placeholder objects and one fresh type per execution object."""
    taken = _identifiers(px, an)

    def fresh(base: str) -> str:
        name, k = base, 1
        while name in taken:
            k += 1
            name = f"{base}{k}"
        taken.add(name)
        return name

    new_obj, new_type = {}, {}
    for o in sorted(px.objects):
        new_obj[o] = fresh(f"{o}@px")
        new_type[o] = fresh(f"{o}@type")
    return RenamingMaps(
        new_obj=new_obj,
        new_type=new_type,
        orob={v: k for k, v in new_obj.items()},
        orty={new_type[o]: px.object_types[o] for o in px.objects},
    )


def px_place(o: str, i: int | str) -> str:
    return f"({o},{i})"


def build_px_net(px: ProcessExecution, maps: RenamingMaps) -> AcceptingNet:
    places, arcs = {}, {}
    transitions = {eid: ev.activity for eid, ev in px.events.items()}
    init, final = [], []
    for o in sorted(px.objects):
        trace = px.traces.get(o, ())
        if not trace:
            raise InputError(f"object {o!r} has an empty trace inside the execution")
        ty = maps.new_type[o]
        path = [px_place(o, "s")] + [px_place(o, i) for i in range(1, len(trace))] + [px_place(o, "e")]
        for p in path:
            places[p] = ty
        for i, e in enumerate(trace):
            arcs[(path[i], e)] = 1
            arcs[(e, path[i + 1])] = 1
        init.append((path[0], maps.new_obj[o]))
        final.append((path[-1], maps.new_obj[o]))
    net = ObjectCentricPetriNet(places, transitions, arcs, {})
    return AcceptingNet(net, Marking.of(init), Marking.of(final))


def _objects_by_type(objects: Mapping[str, str]) -> dict[str, list[str]]:
    by_type: dict[str, list[str]] = {}
    for o in sorted(objects):
        by_type.setdefault(objects[o], []).append(o)
    return by_type


def expanded_id(t: str, counts: Mapping[str, int]) -> str:
    if not counts:
        return t
    return f"{t}[" + ",".join(f"{ot}={c}" for ot, c in sorted(counts.items())) + "]"


def expand_variable_arcs(
    an: AcceptingNet,
    objects: ProcessExecution | Mapping[str, str],
    *,
    min_variable_count: int = 0,
    cap: int = DEFAULT_EXPANSION_CAP,
) -> AcceptingNet:
    """Replace every variable arc by fixed-weight copies for the given objects.

    ``objects`` maps object id to type (or is an execution). Each transition
    gets one copy per vector of counts over its variable types, each count
    ranging from ``min_variable_count`` to the number of objects of that type.
    Initial and final markings are rebuilt from source and sink places.
    """
    if isinstance(objects, ProcessExecution):
        objects = objects.object_types
    net = an.net
    by_type = _objects_by_type(objects)
    vectors = {}
    total = 0
    for t in sorted(net.transitions):
        vtypes = sorted(net.tpl_var(t))
        ranges = [range(min_variable_count, len(by_type.get(ot, ())) + 1) for ot in vtypes]
        vectors[t] = (vtypes, ranges)
        total += math.prod(len(r) for r in ranges)
    if total > cap:
        raise ResourceLimitExceeded(f"variable-arc expansion needs {total} transitions (cap {cap})")

    transitions, arcs = {}, {}
    for t in sorted(net.transitions):
        vtypes, ranges = vectors[t]
        for combo in itertools.product(*ranges):
            counts = dict(zip(vtypes, combo))
            tid = expanded_id(t, counts)
            if tid in transitions or tid in net.places:
                raise InputError(f"expanded transition id {tid!r} collides with an existing id")
            transitions[tid] = net.transitions[t]
            for p, w in net.preset(t).items():
                fixed = w - net.variable_arcs.get((p, t), 0)
                k = counts.get(net.places[p], 0) if net.variable_arcs.get((p, t)) else 0
                if fixed + k:
                    arcs[(p, tid)] = fixed + k
            for p, w in net.postset(t).items():
                fixed = w - net.variable_arcs.get((t, p), 0)
                k = counts.get(net.places[p], 0) if net.variable_arcs.get((t, p)) else 0
                if fixed + k:
                    arcs[(tid, p)] = fixed + k

    init = [(p, o) for p in net.source_places() for o in by_type.get(net.places[p], ())]
    final = [(p, o) for p in net.sink_places() for o in by_type.get(net.places[p], ())]
    out = AcceptingNet(
        ObjectCentricPetriNet(dict(net.places), transitions, arcs, {}),
        Marking.of(init),
        Marking.of(final),
    )
    for given, derived, which in ((an.initial, out.initial, "initial"), (an.final, out.final, "final")):
        if len(given) and given != derived:
            logger.warning("%s marking in the net file is replaced by the structural one derived from the objects", which)
    return out


@dataclass(frozen=True)
class SyncProductNet:
    """The product net plus what is needed to read its bindings as moves.

    ``tags`` maps each product transition to ``log``/``model``/``sync``;
    ``origin`` maps it to its (execution transition, de-jure transition)
    pair with ``None`` for a skipped side; ``nu`` maps in-arcs of synchronous
    transitions to variable names; ``objects`` is the object universe per
    type that bindings may draw from.
    """

    net: AcceptingNet
    tags: Mapping[str, str]
    origin: Mapping[str, tuple[str | None, str | None]]
    nu: Mapping[tuple[str, str], str]
    maps: RenamingMaps
    objects: Mapping[str, tuple[str, ...]]
    px_net: AcceptingNet
    dj_net: AcceptingNet
    px_places: frozenset[str]
    dj_places: frozenset[str]

    def event_of(self, t: str) -> str | None:
        return self.origin[t][0]


def _pxp(p: str) -> str:
    return f"px|{p}"


def _djp(p: str) -> str:
    return f"dj|{p}"


def sync_compatible(px_net: ObjectCentricPetriNet, t_px: str, dj_net: ObjectCentricPetriNet, t_dj: str, orty) -> bool:
    """Same label, same original types, and matching token counts per type.

    For every de-jure place of type ``ot`` around ``t_dj`` the arc weight
    must equal the total weight of execution arcs whose fresh type maps back
    to ``ot``; with one object per type this is the pairwise weight check.
    """
    label = dj_net.transitions[t_dj]
    if label is None or label != px_net.transitions[t_px]:
        return False
    if {orty[ty] for ty in px_net.tpl(t_px)} != dj_net.tpl(t_dj):
        return False
    for px_side, dj_side in (
        (px_net.preset(t_px), dj_net.preset(t_dj)),
        (px_net.postset(t_px), dj_net.postset(t_dj)),
    ):
        per_type: dict[str, int] = {}
        for p, w in px_side.items():
            ot = orty[px_net.places[p]]
            per_type[ot] = per_type.get(ot, 0) + w
        for p, w in dj_side.items():
            ot = dj_net.places[p]
            if ot in per_type and per_type[ot] != w:
                return False
    return True


def build_synchronous_product(px_net: AcceptingNet, dj_net: AcceptingNet, maps: RenamingMaps) -> SyncProductNet:
    if px_net.net.has_variable_arcs() or dj_net.net.has_variable_arcs():
        raise InputError("both nets must be free of variable arcs")
    pxn, djn = px_net.net, dj_net.net
    places = {_pxp(p): ty for p, ty in pxn.places.items()}
    places.update({_djp(p): ty for p, ty in djn.places.items()})
    if len(places) != len(pxn.places) + len(djn.places):
        raise InputError("place id collision after prefixing")

    transitions, arcs, tags, origin, nu = {}, {}, {}, {}, {}

    def add(tid, label, tag, t_px, t_dj):
        if tid in transitions or tid in places:
            raise InputError(f"transition id collision after prefixing: {tid!r}")
        transitions[tid] = label
        tags[tid] = tag
        origin[tid] = (t_px, t_dj)
        if t_px is not None:
            for p, w in pxn.preset(t_px).items():
                arcs[(_pxp(p), tid)] = w
            for p, w in pxn.postset(t_px).items():
                arcs[(tid, _pxp(p))] = w
        if t_dj is not None:
            for p, w in djn.preset(t_dj).items():
                arcs[(_djp(p), tid)] = w
            for p, w in djn.postset(t_dj).items():
                arcs[(tid, _djp(p))] = w

    for t in sorted(pxn.transitions):
        add(f"({t},{SKIP})", pxn.transitions[t], "log", t, None)
    for t in sorted(djn.transitions):
        add(f"({SKIP},{t})", djn.transitions[t], "model", None, t)
    for tp in sorted(pxn.transitions):
        for td in sorted(djn.transitions):
            if not sync_compatible(pxn, tp, djn, td, maps.orty):
                continue
            tid = f"({tp},{td})"
            add(tid, pxn.transitions[tp], "sync", tp, td)
            for p in pxn.preset(tp):
                ot = maps.orty[pxn.places[p]]
                var = f"{tid}:{ot}"
                nu[(_pxp(p), tid)] = var
                for q in djn.preset(td):
                    if djn.places[q] == ot:
                        nu[(_djp(q), tid)] = var

    universe: dict[str, list[str]] = {}
    for fresh_obj, o in maps.orob.items():
        universe.setdefault(maps.new_type[o], []).append(fresh_obj)
        universe.setdefault(maps.orty[maps.new_type[o]], []).append(o)
    objects = {ot: tuple(sorted(objs)) for ot, objs in sorted(universe.items())}

    init = Marking.of([(_pxp(p), o) for p, o in px_net.initial.tokens()] + [(_djp(p), o) for p, o in dj_net.initial.tokens()])
    final = Marking.of([(_pxp(p), o) for p, o in px_net.final.tokens()] + [(_djp(p), o) for p, o in dj_net.final.tokens()])
    under = AcceptingNet(ObjectCentricPetriNet(places, transitions, arcs, {}), init, final)
    return SyncProductNet(
        net=under,
        tags=tags,
        origin=origin,
        nu=nu,
        maps=maps,
        objects=objects,
        px_net=px_net,
        dj_net=dj_net,
        px_places=frozenset(_pxp(p) for p in pxn.places),
        dj_places=frozenset(_djp(p) for p in djn.places),
    )


def nu_valid(sp: SyncProductNet, binding: Binding) -> bool:
    """Synchronous bindings must use the same original objects on both sides.

    Checked per original type: the de-jure objects equal the originals of
    the placeholder objects bound on the execution side.
    """
    t = binding.transition
    if sp.tags[t] != "sync":
        return True
    orty, orob = sp.maps.orty, sp.maps.orob
    px_side: dict[str, set[str]] = {}
    dj_side: dict[str, set[str]] = {}
    for ot, objs in binding.assignment:
        if ot in orty:
            px_side.setdefault(orty[ot], set()).update(orob[o] for o in objs)
        else:
            dj_side.setdefault(ot, set()).update(objs)
    return px_side == dj_side


def valid_bindings_sp(
    sp: SyncProductNet, marking: Marking, t: str, *, cap: int = DEFAULT_BINDING_CAP
) -> list[Binding]:
    found = enabled_bindings(sp.net.net, marking, t, universe=sp.objects, cap=cap)
    return [b for b in found if nu_valid(sp, b)]


def move_for_binding(sp: SyncProductNet, binding: Binding, move_id: str) -> Move:
    t = binding.transition
    tag = sp.tags[t]
    t_px, t_dj = sp.origin[t]
    orob = sp.maps.orob
    if tag == "log":
        return Move(
            move_id,
            MoveKind.LOG,
            log_activity=sp.px_net.net.transitions[t_px],
            log_objects=frozenset(orob[o] for o in binding.objects()),
            event=t_px,
        )
    label = sp.dj_net.net.transitions[t_dj]
    if tag == "model":
        return Move(move_id, MoveKind.MODEL, model_transition=t_dj, model_label=label, model_objects=binding.objects())
    dj_objs = frozenset(o for o in binding.objects() if o not in orob)
    return Move(
        move_id,
        MoveKind.SYNC,
        log_activity=label,
        log_objects=dj_objs,
        model_transition=t_dj,
        model_label=label,
        model_objects=dj_objs,
        event=t_px,
    )


def product_to_dict(sp: SyncProductNet) -> dict:
    doc = net_to_dict(sp.net)
    for entry in doc["transitions"]:
        entry["tag"] = sp.tags[entry["id"]]
    doc["nu"] = [{"transition": t, "place": p, "var": v} for (p, t), v in sorted(sp.nu.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
    return doc


def prepare(px: ProcessExecution, an: AcceptingNet, *, min_variable_count: int = 0) -> SyncProductNet:
    """Execution net, expanded de-jure net and their product, in one call."""
    maps = generate_fresh_ids(px, an)
    px_net = build_px_net(px, maps)
    dj_net = expand_variable_arcs(an, px, min_variable_count=min_variable_count)
    return build_synchronous_product(px_net, dj_net, maps)
