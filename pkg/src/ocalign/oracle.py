"""Brute-force reference for optimal alignment cost.

Materialises the whole reachable marking graph of a product with the
symbolic token game, then relaxes every edge until nothing changes
(Bellman-Ford). Shares no search code with :mod:`ocalign.search`; meant for
small instances only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .alignment import Cost, move_cost
from .errors import ResourceLimitExceeded
from .petri import Binding, fire
from .product import SyncProductNet, move_for_binding, valid_bindings_sp


@dataclass
class OracleResult:
    optimal_cost: Cost | None
    witness: list[Binding] | None
    explored: int

    @property
    def alignable(self) -> bool:
        return self.optimal_cost is not None


def reachable_graph(sp: SyncProductNet, *, max_states: int = 200_000):
    """All markings reachable from the initial one and every binding edge."""
    net = sp.net.net
    index = {sp.net.initial: 0}
    markings = [sp.net.initial]
    edges: list[tuple[int, int, Cost, Binding]] = []
    queue = deque([sp.net.initial])
    weights: dict[Binding, Cost] = {}
    while queue:
        m = queue.popleft()
        src = index[m]
        for t in sorted(net.transitions):
            for b in valid_bindings_sp(sp, m, t):
                nxt = fire(net, m, b)
                if nxt not in index:
                    if len(markings) >= max_states:
                        raise ResourceLimitExceeded(f"oracle exceeded {max_states} markings")
                    index[nxt] = len(markings)
                    markings.append(nxt)
                    queue.append(nxt)
                if b not in weights:
                    weights[b] = move_cost(move_for_binding(sp, b, "w"))
                edges.append((src, index[nxt], weights[b], b))
    return markings, index, edges


def brute_force_optimal(sp: SyncProductNet, *, max_states: int = 200_000) -> OracleResult:
    markings, index, edges = reachable_graph(sp, max_states=max_states)
    dist: list[Cost | None] = [None] * len(markings)
    pred: list[tuple[int, Binding] | None] = [None] * len(markings)
    dist[0] = Cost(0, 0)
    for _ in range(len(markings)):
        changed = False
        for src, dst, w, b in edges:
            if dist[src] is None:
                continue
            cand = dist[src] + w
            if dist[dst] is None or cand < dist[dst]:
                dist[dst] = cand
                pred[dst] = (src, b)
                changed = True
        if not changed:
            break

    target = index.get(sp.net.final)
    if target is None or dist[target] is None:
        return OracleResult(None, None, len(markings))
    witness = []
    node = target
    while node != 0:
        node, b = pred[node]
        witness.append(b)
    witness.reverse()
    return OracleResult(dist[target], witness, len(markings))


def final_reachable(sp: SyncProductNet, *, max_states: int = 200_000) -> bool:
    markings, index, _ = reachable_graph(sp, max_states=max_states)
    return sp.net.final in index


