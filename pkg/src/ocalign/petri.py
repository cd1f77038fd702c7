"""Object-centric Petri nets: structure, markings, bindings and the token game."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import BindingNotEnabled, InputError, ResourceLimitExceeded

DEFAULT_BINDING_CAP = 10_000

Arc = tuple[str, str]


@dataclass(frozen=True)
class ObjectCentricPetriNet:
    """Typed places, labelled transitions and weighted arcs.

    ``transitions`` maps a transition id to its activity label, with ``None``
    standing for a silent transition. ``arcs`` maps ``(source, target)`` to a
    positive weight; ``variable_arcs`` is the variable part of ``arcs``.
    """

    places: Mapping[str, str]
    transitions: Mapping[str, str | None]
    arcs: Mapping[Arc, int]
    variable_arcs: Mapping[Arc, int] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.places) & set(self.transitions)
        if overlap:
            raise InputError(f"ids used for both places and transitions: {sorted(overlap)}")
        for (src, tgt), w in self.arcs.items():
            p_t = src in self.places and tgt in self.transitions
            t_p = src in self.transitions and tgt in self.places
            if not (p_t or t_p):
                raise InputError(f"arc ({src}, {tgt}) does not connect an existing place and transition")
            if not isinstance(w, int) or w < 1:
                raise InputError(f"arc ({src}, {tgt}) needs a positive integer weight")
        for arc, w in self.variable_arcs.items():
            if w > self.arcs.get(arc, 0):
                raise InputError(f"F_var exceeds F on arc {arc}")
        # adjacency caches; the dataclass is frozen so go through object.__setattr__
        pre: dict[str, dict[str, int]] = {t: {} for t in self.transitions}
        post: dict[str, dict[str, int]] = {t: {} for t in self.transitions}
        for (src, tgt), w in self.arcs.items():
            if src in self.places:
                pre[tgt][src] = w
            else:
                post[src][tgt] = w
        object.__setattr__(self, "_pre", pre)
        object.__setattr__(self, "_post", post)

    def preset(self, t: str) -> dict[str, int]:
        return self._pre[t]

    def postset(self, t: str) -> dict[str, int]:
        return self._post[t]

    def label(self, t: str) -> str | None:
        return self.transitions[t]

    def is_silent(self, t: str) -> bool:
        return self.transitions[t] is None

    def pl(self, t: str) -> set[str]:
        return set(self._pre[t]) | set(self._post[t])

    def _adjacent_arcs(self, t: str) -> list[tuple[str, Arc]]:
        return [(p, (p, t)) for p in self._pre[t]] + [(p, (t, p)) for p in self._post[t]]

    def pl_var(self, t: str) -> set[str]:
        return {p for p, arc in self._adjacent_arcs(t) if self.variable_arcs.get(arc, 0) > 0}

    def pl_nv(self, t: str) -> set[str]:
        return {p for p, arc in self._adjacent_arcs(t) if self.arcs[arc] > self.variable_arcs.get(arc, 0)}

    def tpl(self, t: str) -> set[str]:
        return {self.places[p] for p in self.pl(t)}

    def tpl_var(self, t: str) -> set[str]:
        return {self.places[p] for p in self.pl_var(t)}

    def tpl_nv(self, t: str) -> set[str]:
        return {self.places[p] for p in self.pl_nv(t)}

    @property
    def types(self) -> set[str]:
        return set(self.places.values())

    def has_variable_arcs(self) -> bool:
        return any(w > 0 for w in self.variable_arcs.values())

    def source_places(self) -> list[str]:
        fed = {tgt for (src, tgt) in self.arcs if src in self.transitions}
        return sorted(p for p in self.places if p not in fed)

    def sink_places(self) -> list[str]:
        drained = {src for (src, tgt) in self.arcs if src in self.places}
        return sorted(p for p in self.places if p not in drained)


@dataclass(frozen=True)
class Marking:
    """A multiset of ``(place, object)`` tokens in canonical sorted form."""

    items: tuple[tuple[str, str, int], ...] = ()

    @classmethod
    def of(cls, tokens: Iterable[tuple[str, str]] | Mapping[tuple[str, str], int]) -> "Marking":
        if isinstance(tokens, Mapping):
            counts = Counter(tokens)
        else:
            counts = Counter(tuple(tok) for tok in tokens)
        return cls(tuple(sorted((p, o, n) for (p, o), n in counts.items() if n > 0)))

    def counts(self) -> Counter:
        return Counter({(p, o): n for p, o, n in self.items})

    def __len__(self) -> int:
        return sum(n for _, _, n in self.items)

    def __le__(self, other: "Marking") -> bool:
        theirs = other.counts()
        return all(theirs[(p, o)] >= n for p, o, n in self.items)

    def __add__(self, other: "Marking") -> "Marking":
        return Marking.of(self.counts() + other.counts())

    def __sub__(self, other: "Marking") -> "Marking":
        return Marking.of(self.counts() - other.counts())

    def tokens(self) -> list[tuple[str, str]]:
        return [(p, o) for p, o, n in self.items for _ in range(n)]

    def objects(self) -> set[str]:
        return {o for _, o, _ in self.items}

    def __str__(self) -> str:
        return "[" + ", ".join(f"({p},{o})" + (f"^{n}" if n > 1 else "") for p, o, n in self.items) + "]"


@dataclass(frozen=True)
class Binding:
    """A transition together with the objects it binds per object type."""

    transition: str
    assignment: tuple[tuple[str, tuple[str, ...]], ...]

    @classmethod
    def of(cls, transition: str, object_map: Mapping[str, Iterable[str]]) -> "Binding":
        return cls(transition, tuple(sorted((ot, tuple(sorted(objs))) for ot, objs in object_map.items())))

    @property
    def object_map(self) -> dict[str, frozenset[str]]:
        return {ot: frozenset(objs) for ot, objs in self.assignment}

    def objects(self) -> frozenset[str]:
        return frozenset(o for _, objs in self.assignment for o in objs)

    def key(self) -> str:
        inner = ";".join(f"{ot}:{','.join(objs)}" for ot, objs in self.assignment)
        return f"{self.transition}{{{inner}}}"

    def __str__(self) -> str:
        return self.key()


@dataclass(frozen=True)
class AcceptingNet:
    net: ObjectCentricPetriNet
    initial: Marking
    final: Marking

    def __post_init__(self):
        for m, which in ((self.initial, "initial"), (self.final, "final")):
            for p, o, _ in m.items:
                if p not in self.net.places:
                    raise InputError(f"{which} marking uses unknown place {p!r}")
        _object_types(self.net, [self.initial, self.final])

    @property
    def object_types(self) -> dict[str, str]:
        return _object_types(self.net, [self.initial, self.final])


def _object_types(net: ObjectCentricPetriNet, markings: Sequence[Marking]) -> dict[str, str]:
    types: dict[str, str] = {}
    for m in markings:
        for p, o, _ in m.items:
            ot = net.places[p]
            if types.setdefault(o, ot) != ot:
                raise InputError(f"token ({p}, {o}) in a place of mismatched type: {o!r} is already {types[o]!r}")
    return types


def check_well_formed(net: ObjectCentricPetriNet) -> list[str]:
    """Transitions where some type sits on both a variable and a non-variable arc."""
    return sorted(t for t in net.transitions if net.tpl_var(t) & net.tpl_nv(t))


def cons(net: ObjectCentricPetriNet, binding: Binding) -> Counter:
    bmap = binding.object_map
    return Counter(
        {(p, o): 1 for p in net.preset(binding.transition) for o in bmap.get(net.places[p], ())}
    )


def prod(net: ObjectCentricPetriNet, binding: Binding) -> Counter:
    bmap = binding.object_map
    return Counter(
        {(p, o): 1 for p in net.postset(binding.transition) for o in bmap.get(net.places[p], ())}
    )


def required_counts(net: ObjectCentricPetriNet, t: str) -> dict[str, int] | None:
    """Objects each adjacent type must bind, or None if the arc weights disagree.

    Arcs of one type around a transition carry the same objects, so every
    such arc must have the same weight for a binding to exist.
    """
    req: dict[str, int] = {}
    for p, w in itertools.chain(net.preset(t).items(), net.postset(t).items()):
        ot = net.places[p]
        if req.setdefault(ot, w) != w:
            return None
    return req


def is_binding_shape_valid(net: ObjectCentricPetriNet, binding: Binding) -> bool:
    req = required_counts(net, binding.transition)
    if req is None:
        return False
    bmap = binding.object_map
    return set(bmap) == set(req) and all(len(bmap[ot]) == k for ot, k in req.items())


def enabled_bindings(
    net: ObjectCentricPetriNet,
    marking: Marking,
    t: str,
    *,
    universe: Mapping[str, Iterable[str]] | None = None,
    cap: int = DEFAULT_BINDING_CAP,
) -> list[Binding]:
    """All bindings of ``t`` enabled in ``marking``, in lexicographic order.

    Candidate objects for a consumed type are those present in every input
    place of that type. Types that are only produced draw from ``universe``
    (type -> objects) or, failing that, from the objects in the marking.
    """
    if t not in net.transitions:
        raise KeyError(f"unknown transition {t!r}")
    if net.has_variable_arcs():
        raise InputError("net has variable arcs; preprocess it before enumerating bindings")
    req = required_counts(net, t)
    if req is None:
        return []
    counts = marking.counts()
    pre = net.preset(t)
    choices = []
    for ot in sorted(req):
        inputs = [p for p in pre if net.places[p] == ot]
        if inputs:
            cands = set.intersection(*({o for (q, o), n in counts.items() if q == p and n > 0} for p in inputs))
        elif universe is not None:
            cands = set(universe.get(ot, ()))
        else:
            cands = {o for (q, o) in counts if net.places[q] == ot}
        choices.append(sorted(cands))
    total = math.prod(math.comb(len(c), req[ot]) for c, ot in zip(choices, sorted(req)))
    if total > cap:
        raise ResourceLimitExceeded(f"transition {t!r} has {total} candidate bindings (cap {cap})")
    types = sorted(req)
    combos = [itertools.combinations(c, req[ot]) for c, ot in zip(choices, types)]
    return [Binding.of(t, dict(zip(types, pick))) for pick in itertools.product(*combos)]


def fire(net: ObjectCentricPetriNet, marking: Marking, binding: Binding) -> Marking:
    if not is_binding_shape_valid(net, binding):
        raise BindingNotEnabled(f"binding {binding} does not fit the arcs of {binding.transition!r}")
    have = marking.counts()
    need = cons(net, binding)
    if any(have[tok] < n for tok, n in need.items()):
        raise BindingNotEnabled(f"binding {binding} is not enabled in {marking}")
    return Marking.of(have - need + prod(net, binding))


@dataclass(frozen=True)
class ReplayResult:
    marking: Marking
    failed_at: int | None
    accepted: bool


def replay(an: AcceptingNet, bindings: Sequence[Binding]) -> ReplayResult:
    m = an.initial
    for i, b in enumerate(bindings):
        try:
            m = fire(an.net, m, b)
        except (BindingNotEnabled, KeyError):
            return ReplayResult(m, i, False)
    return ReplayResult(m, None, m == an.final)


def _marking_from_json(entries, places: Mapping[str, str], which: str) -> Marking:
    if not isinstance(entries, list):
        raise InputError(f"{which} must be a list of tokens")
    toks = []
    for e in entries:
        if not isinstance(e, dict) or not isinstance(e.get("place"), str) or not isinstance(e.get("object"), str):
            raise InputError(f"malformed token in {which}: {e!r}")
        if e["place"] not in places:
            raise InputError(f"token in {which} refers to unknown place {e['place']!r}")
        toks.append((e["place"], e["object"]))
    return Marking.of(toks)


def parse_ocpn(raw: bytes | str) -> AcceptingNet:
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"net is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("net must be a JSON object")
    try:
        places = {}
        for p in doc["places"]:
            if not isinstance(p.get("id"), str) or not isinstance(p.get("type"), str):
                raise InputError(f"malformed place {p!r}")
            if p["id"] in places:
                raise InputError(f"duplicate place id {p['id']!r}")
            places[p["id"]] = p["type"]
        transitions = {}
        for t in doc["transitions"]:
            label = t.get("label")
            if not isinstance(t.get("id"), str) or not (label is None or isinstance(label, str)):
                raise InputError(f"malformed transition {t!r}")
            if t["id"] in transitions:
                raise InputError(f"duplicate transition id {t['id']!r}")
            transitions[t["id"]] = label
        arcs: Counter = Counter()
        var: Counter = Counter()
        for a in doc.get("arcs", []):
            src, tgt = a.get("source"), a.get("target")
            w = a.get("weight", 1)
            if not isinstance(src, str) or not isinstance(tgt, str) or not isinstance(w, int) or w < 1:
                raise InputError(f"malformed arc {a!r}")
            for end in (src, tgt):
                if end not in places and end not in transitions:
                    raise InputError(f"arc to nonexistent node {end!r}")
            arcs[(src, tgt)] += w
            if a.get("variable", False):
                var[(src, tgt)] += w
        initial = _marking_from_json(doc.get("initial_marking", []), places, "initial_marking")
        final = _marking_from_json(doc.get("final_marking", []), places, "final_marking")
    except (KeyError, AttributeError, TypeError) as exc:
        raise InputError(f"net does not follow the schema: {exc}") from exc
    net = ObjectCentricPetriNet(places, transitions, dict(arcs), dict(var))
    bad = check_well_formed(net)
    if bad:
        raise InputError(f"net is not well-formed at transitions {bad}")
    return AcceptingNet(net, initial, final)


def net_to_dict(an: AcceptingNet) -> dict:
    net = an.net
    arcs = []
    for (src, tgt) in sorted(net.arcs):
        w = net.arcs[(src, tgt)]
        v = net.variable_arcs.get((src, tgt), 0)
        if v:
            arcs.append({"source": src, "target": tgt, "weight": v, "variable": True})
        if w - v:
            arcs.append({"source": src, "target": tgt, "weight": w - v, "variable": False})
    return {
        "places": [{"id": p, "type": net.places[p]} for p in sorted(net.places)],
        "transitions": [{"id": t, "label": net.transitions[t]} for t in sorted(net.transitions)],
        "arcs": arcs,
        "initial_marking": [{"place": p, "object": o} for p, o in an.initial.tokens()],
        "final_marking": [{"place": p, "object": o} for p, o in an.final.tokens()],
    }


def dump_ocpn(an: AcceptingNet) -> str:
    return json.dumps(net_to_dict(an), indent=2)
