"""Synthetic event logs: random accepted runs of a net, then noise."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Mapping

from .errors import InputError
from .log import Event, EventLog
from .petri import AcceptingNet
from .product import expand_variable_arcs
from .search import compile_net

logger = logging.getLogger(__name__)


class GenerationError(InputError):
    pass


@dataclass(frozen=True)
class NoiseSpec:
    remove_prob: float = 0.0
    replace_prob: float = 0.0
    insert_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("remove_prob", "replace_prob", "insert_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def is_zero(self) -> bool:
        return self.remove_prob == self.replace_prob == self.insert_prob == 0.0


def random_run(an: AcceptingNet, objects: Mapping[str, str], rng: random.Random, *, retries: int = 50, max_steps: int = 500):
    """One accepted binding sequence of ``an`` for ``objects``.

    A randomized depth-first walk: at each marking an enabled transition is
    picked uniformly, then one of its bindings. Markings that cannot reach the
    final marking are remembered and backtracked out of. Bindings without
    objects are never chosen. ``retries`` bounds the number of backtracks in
    thousands, ``max_steps`` the run length.
    """
    dj = expand_variable_arcs(an, objects)
    universe: dict[str, list[str]] = {}
    for o in sorted(objects):
        universe.setdefault(objects[o], []).append(o)
    cn = compile_net(dj, universe)
    if cn.final is None:
        raise GenerationError("final marking can never be reached")
    kernel = cn.kernel()
    usable = [bool(b.objects()) for b in cn.bindings]
    final = cn.final.tobytes()

    def options(m):
        idx, nxt = kernel(m)
        by_t: dict[str, list[int]] = {}
        for j, b in enumerate(idx):
            if usable[b]:
                by_t.setdefault(cn.bindings[b].transition, []).append(j)
        order = []
        ts = sorted(by_t)
        rng.shuffle(ts)
        for t in ts:
            js = by_t[t][:]
            rng.shuffle(js)
            order.extend((int(idx[j]), nxt[j]) for j in js)
        return order[::-1]

    dead: set[bytes] = set()
    stack = [(cn.initial.copy(), None, options(cn.initial))]
    budget = retries * 1000
    while stack:
        m, _, opts = stack[-1]
        if m.tobytes() == final:
            return dj, [cn.bindings[b] for _, b, _ in stack[1:]]
        while opts and opts[-1][1].tobytes() in dead:
            opts.pop()
        if not opts or len(stack) > max_steps:
            dead.add(m.tobytes())
            stack.pop()
            budget -= 1
            if budget <= 0:
                break
            continue
        b, nm = opts.pop()
        stack.append((nm, b, options(nm)))
    raise GenerationError(f"no accepted run found for objects {sorted(objects)}")


def _apply_noise(events: list[Event], activities: list[str], noise: NoiseSpec, rng: random.Random) -> list[Event]:
    out = []
    for ev in events:
        objs = sorted(ev.objects)
        act = ev.activity
        if rng.random() < noise.remove_prob:
            objs.remove(rng.choice(objs))
        if rng.random() < noise.replace_prob:
            others = [a for a in activities if a != act]
            if others:
                act = rng.choice(others)
        dup = None
        if rng.random() < noise.insert_prob:
            dup = Event(f"{ev.id}d", ev.activity, ev.timestamp + 5, frozenset([rng.choice(sorted(ev.objects))]))
        if objs:
            out.append(Event(ev.id, act, ev.timestamp, frozenset(objs)))
        if dup is not None:
            out.append(dup)
    return out


def generate_log(
    an: AcceptingNet,
    n_executions: int,
    objects_per_type: Mapping[str, tuple[int, int]],
    noise: NoiseSpec | None = None,
    seed: int = 0,
    *,
    retries: int = 50,
) -> EventLog:
    """Simulate ``n_executions`` runs and perturb them with ``noise``.

    ``objects_per_type`` gives an inclusive (min, max) object count per type.
    Timestamps follow firing order; objects left without events after noise
    are dropped with a warning.
    """
    noise = noise or NoiseSpec(seed=seed)
    rng = random.Random(seed)
    noise_rng = random.Random(noise.seed)
    activities = sorted({lab for lab in an.net.transitions.values() if lab is not None})
    object_types: dict[str, str] = {}
    events: list[Event] = []
    for k in range(n_executions):
        objects = {}
        for ot in sorted(objects_per_type):
            lo, hi = objects_per_type[ot]
            for j in range(rng.randint(lo, hi)):
                objects[f"{ot}{k}_{j}"] = ot
        dj, seq = random_run(an, objects, rng, retries=retries)
        run = []
        for i, b in enumerate(seq):
            label = dj.net.transitions[b.transition]
            if label is None:
                continue
            run.append(Event(f"e{k}_{i:03d}", label, k * 1_000_000 + 10 * i, b.objects()))
        if not noise.is_zero:
            run = _apply_noise(run, activities, noise, noise_rng)
        events.extend(run)
        object_types.update(objects)

    used = {o for ev in events for o in ev.objects}
    for o in sorted(set(object_types) - used):
        logger.warning("object %s has no events left and is dropped", o)
        del object_types[o]
    return EventLog({ev.id: ev for ev in events}, object_types)
