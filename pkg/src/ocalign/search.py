"""Cheapest-path search over the reachable markings of a synchronous product.

Bindings are ground once per product (every transition with every object
assignment drawn from the execution's objects) and stored as sparse
consume/produce vectors over token slots. Uniform-cost search then works on
integer marking vectors, with successor generation delegated to
:mod:`ocalign._kernels`.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ._kernels import SuccessorKernel
from .alignment import AlignmentGraph, Cost, Move, alignment_cost, move_cost, reduce_log
from .errors import InputError, OcalignError, ResourceLimitExceeded
from .log import ProcessExecution
from .petri import (
    DEFAULT_BINDING_CAP,
    AcceptingNet,
    Binding,
    Marking,
    cons,
    prod,
    replay,
    required_counts,
)
from .product import RenamingMaps, SyncProductNet, move_for_binding, prepare

DEFAULT_MAX_STATES = 5_000_000
DEFAULT_TIMEOUT = 600.0


logger = logging.getLogger(__name__)


class Unalignable(OcalignError):
    """No binding sequence leads from the initial to the final marking."""

    exit_code = 2

    def __init__(self, message: str, stats: "SearchStats | None" = None):
        super().__init__(message)
        self.stats = stats


@dataclass
class SearchStats:
    expanded_states: int = 0
    generated_states: int = 0
    generated_bindings: int = 0
    frontier_peak: int = 0
    elapsed: float = 0.0
    ground_bindings: int = 0
    backend: str = ""

    def to_dict(self, *, with_elapsed: bool = True) -> dict:
        d = {
            "expanded_states": self.expanded_states,
            "generated_states": self.generated_states,
            "generated_bindings": self.generated_bindings,
            "frontier_peak": self.frontier_peak,
            "ground_bindings": self.ground_bindings,
        }
        if with_elapsed:
            d["elapsed"] = self.elapsed
        return d


@dataclass
class CompiledNet:
    """A variable-arc-free net with all its bindings ground to vectors."""

    tokens: list[tuple[str, str]]
    bindings: list[Binding]
    cons_ptr: np.ndarray
    cons_idx: np.ndarray
    cons_val: np.ndarray
    delta_ptr: np.ndarray
    delta_idx: np.ndarray
    delta_val: np.ndarray
    initial: np.ndarray
    final: np.ndarray | None
    index: dict[tuple[str, str], int] = field(default_factory=dict)

    def vector(self, marking: Marking) -> np.ndarray | None:
        v = np.zeros(len(self.tokens), np.int32)
        for p, o, n in marking.items:
            i = self.index.get((p, o))
            if i is None:
                return None
            v[i] = n
        return v

    def marking(self, vec: np.ndarray) -> Marking:
        return Marking.of({self.tokens[i]: int(vec[i]) for i in np.flatnonzero(vec)})

    def kernel(self, backend: str | None = None) -> SuccessorKernel:
        return SuccessorKernel(
            self.cons_ptr, self.cons_idx, self.cons_val,
            self.delta_ptr, self.delta_idx, self.delta_val,
            len(self.tokens), backend,
        )


def ground_bindings(net, t: str, universe: Mapping[str, Sequence[str]], cap: int) -> list[Binding]:
    """Every binding of ``t`` over the object universe, ignoring the marking."""
    req = required_counts(net, t)
    if req is None:
        return []
    types = sorted(req)
    pools = [sorted(universe.get(ot, ())) for ot in types]
    total = math.prod(math.comb(len(pool), req[ot]) for pool, ot in zip(pools, types))
    if total > cap:
        raise ResourceLimitExceeded(f"transition {t!r} has {total} ground bindings (cap {cap})")
    combos = [itertools.combinations(pool, req[ot]) for pool, ot in zip(pools, types)]
    return [Binding.of(t, dict(zip(types, pick))) for pick in itertools.product(*combos)]


def _sync_binding(sp: SyncProductNet, t: str) -> Binding | None:
    # the execution side fixes the objects; the de-jure side must reuse their originals
    t_px, t_dj = sp.origin[t]
    owner = {ty: o for o, ty in sp.maps.new_type.items()}
    bmap: dict[str, set[str]] = {}
    for p in sp.px_net.net.pl(t_px):
        ty = sp.px_net.net.places[p]
        o = owner[ty]
        bmap.setdefault(ty, set()).add(sp.maps.new_obj[o])
        bmap.setdefault(sp.maps.orty[ty], set()).add(o)
    b = Binding.of(t, bmap)
    req = required_counts(sp.net.net, t)
    if req is None or set(req) != set(bmap) or any(len(bmap[ot]) != k for ot, k in req.items()):
        return None
    return b


def compile_net(
    an: AcceptingNet,
    universe: Mapping[str, Sequence[str]] | None = None,
    *,
    bindings: Sequence[Binding] | None = None,
    cap: int = DEFAULT_BINDING_CAP,
) -> CompiledNet:
    net = an.net
    if net.has_variable_arcs():
        raise InputError("net has variable arcs; preprocess it first")
    if universe is None:
        universe = {}
        for p, o, _ in an.initial.items:
            universe.setdefault(net.places[p], set()).add(o)
    if bindings is None:
        bindings = [b for t in sorted(net.transitions) for b in ground_bindings(net, t, universe, cap)]

    index: dict[tuple[str, str], int] = {}
    tokens: list[tuple[str, str]] = []

    def slot(tok):
        if tok not in index:
            index[tok] = len(tokens)
            tokens.append(tok)
        return index[tok]

    # slots in sorted order so vectors compare canonically
    all_toks = set(an.initial.counts()) | set(an.final.counts())
    per_binding = []
    for b in bindings:
        c, pr = cons(net, b), prod(net, b)
        all_toks |= set(c) | set(pr)
        per_binding.append((c, pr))
    for tok in sorted(all_toks):
        slot(tok)

    cons_ptr, cons_idx, cons_val = [0], [], []
    delta_ptr, delta_idx, delta_val = [0], [], []
    for c, pr in per_binding:
        for tok in sorted(c):
            cons_idx.append(index[tok])
            cons_val.append(c[tok])
        cons_ptr.append(len(cons_idx))
        delta = {}
        for tok, n in c.items():
            delta[index[tok]] = delta.get(index[tok], 0) - n
        for tok, n in pr.items():
            delta[index[tok]] = delta.get(index[tok], 0) + n
        for i in sorted(delta):
            if delta[i]:
                delta_idx.append(i)
                delta_val.append(delta[i])
        delta_ptr.append(len(delta_idx))

    compiled = CompiledNet(
        tokens=tokens,
        bindings=list(bindings),
        cons_ptr=np.asarray(cons_ptr, np.int64),
        cons_idx=np.asarray(cons_idx, np.int64),
        cons_val=np.asarray(cons_val, np.int32),
        delta_ptr=np.asarray(delta_ptr, np.int64),
        delta_idx=np.asarray(delta_idx, np.int64),
        delta_val=np.asarray(delta_val, np.int32),
        initial=np.zeros(len(tokens), np.int32),
        final=None,
        index=index,
    )
    compiled.initial = compiled.vector(an.initial)
    compiled.final = compiled.vector(an.final)
    return compiled


def compile_product(sp: SyncProductNet, *, cap: int = DEFAULT_BINDING_CAP) -> CompiledNet:
    net = sp.net.net
    bindings = []
    for t in sorted(net.transitions):
        if sp.tags[t] == "sync":
            b = _sync_binding(sp, t)
            if b is not None:
                bindings.append(b)
        else:
            bindings.extend(ground_bindings(net, t, sp.objects, cap))
    return compile_net(sp.net, sp.objects, bindings=bindings, cap=cap)


def binding_weights(sp: SyncProductNet, bindings: Sequence[Binding]) -> tuple[list[int], list[int]]:
    vis, sil = [], []
    for b in bindings:
        c = move_cost(move_for_binding(sp, b, "w"))
        vis.append(c.visible)
        sil.append(c.silent)
    return vis, sil


@dataclass
class SearchResult:
    bindings: list[Binding]
    cost: Cost
    stats: SearchStats


def search_optimal(
    sp: SyncProductNet,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    timeout: float = DEFAULT_TIMEOUT,
    backend: str | None = None,
    check_monotone: bool = False,
    compiled: CompiledNet | None = None,
) -> SearchResult:
    """Uniform-cost search from the initial to the final product marking.

    Frontier entries are ordered by (visible cost, silent cost, marking
    bytes) and successors are generated in ground-binding order, which makes
    the returned optimum deterministic. Raises :class:`Unalignable` when the
    final marking is unreachable and :class:`ResourceLimitExceeded` when a
    cap is hit first.
    """
    start = time.perf_counter()
    cn = compiled or compile_product(sp)
    kernel = cn.kernel(backend)
    stats = SearchStats(backend=kernel.backend, ground_bindings=len(cn.bindings))
    if cn.final is None:
        stats.elapsed = time.perf_counter() - start
        raise Unalignable("the final marking uses tokens no binding can produce", stats)
    wv, ws = binding_weights(sp, cn.bindings)
    wv = np.asarray(wv, np.int64)
    ws = np.asarray(ws, np.int64)

    dtype = cn.initial.dtype
    n_tok = len(cn.tokens)
    k0 = cn.initial.tobytes()
    kf = cn.final.tobytes()
    best: dict[bytes, tuple[int, int]] = {k0: (0, 0)}
    parent: dict[bytes, tuple[bytes, int] | None] = {k0: None}
    closed: set[bytes] = set()
    heap = [(0, 0, k0)]
    last = (0, 0)
    while heap:
        vis, sil, key = heapq.heappop(heap)
        if key in closed:
            continue
        if check_monotone:
            assert (vis, sil) >= last, "settled costs decreased"
            last = (vis, sil)
        closed.add(key)
        stats.expanded_states += 1
        if key == kf:
            break
        if stats.expanded_states > max_states:
            stats.elapsed = time.perf_counter() - start
            raise ResourceLimitExceeded(f"expanded more than {max_states} states")
        if time.perf_counter() - start > timeout:
            stats.elapsed = time.perf_counter() - start
            raise ResourceLimitExceeded(f"search exceeded {timeout} s")
        marking = np.frombuffer(key, dtype=dtype, count=n_tok)
        idx, nxt = kernel(marking)
        stats.generated_bindings += len(idx)
        for j in range(len(idx)):
            b = int(idx[j])
            k2 = nxt[j].tobytes()
            if k2 in closed:
                continue
            c2 = (vis + int(wv[b]), sil + int(ws[b]))
            old = best.get(k2)
            if old is None or c2 < old:
                best[k2] = c2
                parent[k2] = (key, b)
                heapq.heappush(heap, (c2[0], c2[1], k2))
        if len(heap) > stats.frontier_peak:
            stats.frontier_peak = len(heap)
    stats.generated_states = len(best)
    stats.elapsed = time.perf_counter() - start
    logger.debug(
        "search done: %d expanded, %d generated, %d ground bindings, backend %s, %.3f s",
        stats.expanded_states, stats.generated_states, stats.ground_bindings, stats.backend, stats.elapsed,
    )
    if kf not in closed:
        raise Unalignable("the de-jure net cannot complete for the objects of this execution", stats)

    seq = []
    key = kf
    while parent[key] is not None:
        key, b = parent[key]
        seq.append(cn.bindings[b])
    seq.reverse()
    return SearchResult(seq, Cost(*best[kf]), stats)


def count_reachable(
    an: AcceptingNet,
    cap: int = 1_000_000,
    *,
    universe: Mapping[str, Sequence[str]] | None = None,
    backend: str | None = None,
    compiled: CompiledNet | None = None,
) -> int:
    """Number of markings reachable from the initial marking (BFS)."""
    cn = compiled or compile_net(an, universe)
    kernel = cn.kernel(backend)
    n_tok = len(cn.tokens)
    seen = {cn.initial.tobytes()}
    queue = deque(seen)
    while queue:
        key = queue.popleft()
        _, nxt = kernel(np.frombuffer(key, dtype=cn.initial.dtype, count=n_tok))
        for row in nxt:
            k2 = row.tobytes()
            if k2 not in seen:
                seen.add(k2)
                if len(seen) > cap:
                    raise ResourceLimitExceeded(f"more than {cap} reachable markings")
                queue.append(k2)
    return len(seen)


def _dj_flow_edges(moves: list[Move], seq: Sequence[Binding], sp: SyncProductNet) -> list[tuple[str, str]]:
    producers: dict[tuple[str, str], list[str]] = {}
    for p, o in sp.net.initial.tokens():
        producers.setdefault((p, o), []).append("")
    edges = []
    net = sp.net.net
    for m, b in zip(moves, seq):
        if not m.has_model:
            continue
        for tok in sorted(cons(net, b)):
            if tok[0] not in sp.dj_places:
                continue
            stack = producers.get(tok)
            src = stack.pop() if stack else ""
            if src and (src, m.id) not in edges:
                edges.append((src, m.id))
        for tok in sorted(prod(net, b)):
            if tok[0] in sp.dj_places:
                producers.setdefault(tok, []).append(m.id)
    return edges


def bindings_to_alignment(
    seq: Sequence[Binding], sp: SyncProductNet, px: ProcessExecution, maps: RenamingMaps | None = None
) -> AlignmentGraph:
    """Turn an accepted product binding sequence into an alignment DAG.

    Log and synchronous moves inherit the execution's edges. Model-side
    precedence follows de-jure token flow (producer to consumer), except that
    a flow edge is dropped when it would add an order between log events
    that the execution does not have.
    """
    result = replay(sp.net, seq)
    if not result.accepted:
        where = result.failed_at if result.failed_at is not None else len(seq)
        raise InputError(f"binding sequence does not replay to the final marking (stopped at {where})")
    moves = [move_for_binding(sp, b, f"m{i}") for i, b in enumerate(seq)]
    by_event = {m.event: m.id for m in moves if m.event is not None}
    if set(by_event) != set(px.events):
        raise InputError("binding sequence does not cover the execution's events exactly once")

    log_edges = {(by_event[a], by_event[b]) for a, b in px.edges}
    edges = set(log_edges)
    moves_t = tuple(moves)
    for cand in _dj_flow_edges(moves, seq, sp):
        if cand in edges:
            continue
        trial = AlignmentGraph(moves_t, frozenset(edges | {cand}))
        if reduce_log(trial).edges <= log_edges:
            edges.add(cand)
    return AlignmentGraph(moves_t, frozenset(edges))


@dataclass
class AlignmentResult:
    px: ProcessExecution
    alignment: AlignmentGraph
    cost: Cost
    bindings: list[Binding]
    stats: SearchStats
    product: SyncProductNet


def align_execution(
    px: ProcessExecution,
    an: AcceptingNet,
    *,
    min_variable_count: int = 0,
    max_states: int = DEFAULT_MAX_STATES,
    timeout: float = DEFAULT_TIMEOUT,
    backend: str | None = None,
) -> AlignmentResult:
    sp = prepare(px, an, min_variable_count=min_variable_count)
    res = search_optimal(sp, max_states=max_states, timeout=timeout, backend=backend)
    g = bindings_to_alignment(res.bindings, sp, px, sp.maps)
    assert alignment_cost(g) == res.cost
    return AlignmentResult(px, g, res.cost, res.bindings, res.stats, sp)
