"""Seeded random small instances for cross-checking the engine against the oracle.

Nets have one or two object types. Each type gets a chain of places from a
source to a sink, walked by backbone transitions, plus a few extra
transitions between random places. Every transition consumes one place and
produces one place per adjacent type, so token counts per object are
conserved and the reachable state space stays finite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InputError
from .generate import GenerationError, NoiseSpec, _apply_noise, random_run
from .log import Event, EventLog, ProcessExecution, extract_process_executions
from .petri import AcceptingNet, Marking, ObjectCentricPetriNet

LABELS = ("a", "b", "c", "d")
TYPES = ("order", "item")


@dataclass(frozen=True)
class Instance:
    seed: int
    net: AcceptingNet
    execution: ProcessExecution


def random_net(rng: random.Random, *, max_transitions: int = 8, labels=LABELS) -> AcceptingNet:
    n_types = rng.choice((1, 2, 2))
    types = TYPES[:n_types]
    places: dict[str, str] = {}
    chains: dict[str, list[str]] = {}
    for ot in types:
        chain = [f"{ot}_p{i}" for i in range(rng.randint(3, 4))]
        chains[ot] = chain
        places.update({p: ot for p in chain})

    transitions: dict[str, str | None] = {}
    arcs: dict[tuple[str, str], int] = {}
    variable: dict[tuple[str, str], int] = {}

    def add(touch: dict[str, tuple[str, str]], silent: bool, var_types=()):
        t = f"t{len(transitions)}"
        transitions[t] = None if silent else rng.choice(labels)
        for ot, (src, tgt) in touch.items():
            arcs[(src, t)] = 1
            arcs[(t, tgt)] = 1
            if ot in var_types:
                variable[(src, t)] = 1
                variable[(t, tgt)] = 1

    # backbone: consecutive chain steps, shared between types where possible
    steps = {ot: list(zip(chains[ot], chains[ot][1:])) for ot in types}
    while any(steps.values()):
        touch = {ot: steps[ot].pop(0) for ot in types if steps[ot] and (len(types) == 1 or rng.random() < 0.7)}
        if not touch:
            continue
        var = [ot for ot in touch if len(touch) > 1 and ot == "item" and rng.random() < 0.5]
        add(touch, silent=False, var_types=var)

    while len(transitions) < max_transitions and rng.random() < 0.75:
        touch = {}
        for ot in types:
            if not touch or rng.random() < 0.3:
                chain = chains[ot]
                i = rng.randrange(len(chain) - 1)
                j = rng.randrange(i + 1, len(chain)) if rng.random() < 0.7 else rng.randrange(1, len(chain))
                j = max(j, 1)
                touch[ot] = (chain[i], chain[j])
        add(touch, silent=rng.random() < 0.15)
    net = ObjectCentricPetriNet(places, transitions, arcs, variable)
    return AcceptingNet(net, Marking(()), Marking(()))


def _random_objects(rng: random.Random, an: AcceptingNet, max_objects: int) -> dict[str, str]:
    types = sorted(an.net.types)
    objs: dict[str, str] = {}
    for ot in types:
        objs[f"{ot[0]}1"] = ot
    while len(objs) < max_objects and rng.random() < 0.75:
        ot = rng.choice(types)
        objs[f"{ot[0]}{sum(1 for v in objs.values() if v == ot) + 1}"] = ot
    return dict(list(objs.items())[:max_objects])


def random_instance(seed: int, *, max_events: int = 6, max_objects: int = 3, max_transitions: int = 8,
                    noise: float = 0.3, foreign_labels: bool = False) -> Instance:
    """A net and one process execution drawn from ``seed``.

    The execution comes from a random accepted run of at most ``max_events``
    visible steps, then noise, then truncation to ``max_events``. With ``foreign_labels`` the log uses
    activity names the net never carries, so no move can be synchronous.
    """
    rng = random.Random(seed)
    for _ in range(100):
        an = random_net(rng, max_transitions=max_transitions)
        objects = _random_objects(rng, an, max_objects)
        try:
            dj, seq = random_run(an, objects, rng, max_steps=40)
        except (GenerationError, InputError):
            continue
        events = [
            Event(f"e{i}", dj.net.transitions[b.transition], 10 * i, b.objects())
            for i, b in enumerate(seq)
            if dj.net.transitions[b.transition] is not None
        ]
        if len(events) > max_events:
            continue
        if noise:
            spec = NoiseSpec(noise / 2, noise / 2, noise / 3)
            events = _apply_noise(events, list(LABELS), spec, rng)
        events = events[:max_events]
        if foreign_labels:
            events = [Event(e.id, "x_" + e.activity, e.timestamp, e.objects) for e in events]
        if not events:
            continue
        used = {o for e in events for o in e.objects}
        log = EventLog({e.id: e for e in events}, {o: objects[o] for o in used})
        pxs = extract_process_executions(log)
        px = max(pxs, key=lambda p: (len(p.events), -pxs.index(p)))
        return Instance(seed, an, px)
    raise GenerationError(f"no instance found for seed {seed}")


def random_instances(n: int, start_seed: int = 0, **kwargs) -> list[Instance]:
    return [random_instance(s, **kwargs) for s in range(start_seed, start_seed + n)]
