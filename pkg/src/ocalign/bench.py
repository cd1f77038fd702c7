"""Scaling harness: align every execution, record size/cost/time, fit log-time slopes."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ResourceLimitExceeded
from .log import EventLog, extract_process_executions
from .petri import AcceptingNet
from .search import DEFAULT_MAX_STATES, DEFAULT_TIMEOUT, Unalignable, align_execution

CSV_COLUMNS = [
    "execution",
    "num_events",
    "num_objects",
    "visible_cost",
    "silent_cost",
    "expanded_states",
    "generated_states",
    "status",
    "elapsed_s",
]


@dataclass
class BenchRecord:
    execution: int
    num_events: int
    num_objects: int
    visible_cost: int | None
    silent_cost: int | None
    expanded_states: int
    generated_states: int
    status: str
    elapsed_s: float


def _run_one(args) -> BenchRecord:
    index, px, an, kw = args
    start = time.perf_counter()
    try:
        res = align_execution(px, an, **kw)
        vis, sil, st, status = res.cost.visible, res.cost.silent, res.stats, "ok"
        expanded, generated = st.expanded_states, st.generated_states
    except Unalignable as exc:
        vis = sil = None
        status = "unalignable"
        expanded = exc.stats.expanded_states if exc.stats else 0
        generated = exc.stats.generated_states if exc.stats else 0
    except ResourceLimitExceeded:
        vis = sil = None
        status = "censored"
        expanded = generated = 0
    return BenchRecord(
        execution=index,
        num_events=len(px.events),
        num_objects=len(px.objects),
        visible_cost=vis,
        silent_cost=sil,
        expanded_states=expanded,
        generated_states=generated,
        status=status,
        elapsed_s=time.perf_counter() - start,
    )


def _slope(x, y) -> float | None:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if len(x) < 2 or np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


def _grouped_slope(x, y, groups) -> float | None:
    # pooled within-group slope: demean x and y inside every group first
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    groups = np.asarray(groups)
    xd, yd = np.empty_like(x), np.empty_like(y)
    for g in np.unique(groups):
        sel = groups == g
        xd[sel] = x[sel] - x[sel].mean()
        yd[sel] = y[sel] - y[sel].mean()
    denom = float((xd * xd).sum())
    if denom == 0.0:
        return None
    return float((xd * yd).sum() / denom)


def fit_slopes(records: list[BenchRecord]) -> dict[str, float | None]:
    """Least-squares slopes of ln(elapsed) against events, objects and cost.

    Only completed alignments enter the fit. The cost slope is computed
    within groups of equal event count. ``None`` marks an undefined slope.
    """
    ok = [r for r in records if r.status == "ok" and r.elapsed_s > 0]
    logt = [math.log(r.elapsed_s) for r in ok]
    return {
        "events": _slope([r.num_events for r in ok], logt),
        "objects": _slope([r.num_objects for r in ok], logt),
        "cost": _grouped_slope([r.visible_cost for r in ok], logt, [r.num_events for r in ok]) if ok else None,
    }


def bench(
    log: EventLog,
    an: AcceptingNet,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    timeout: float = DEFAULT_TIMEOUT,
    min_variable_count: int = 0,
    workers: int = 1,
    backend: str | None = None,
) -> tuple[list[BenchRecord], dict[str, float | None]]:
    from ._kernels import warmup

    warmup(backend)
    kw = dict(max_states=max_states, timeout=timeout, min_variable_count=min_variable_count, backend=backend)
    jobs = [(i, px, an, kw) for i, px in enumerate(extract_process_executions(log))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(job) for job in jobs]
    records.sort(key=lambda r: r.execution)
    return records, fit_slopes(records)


def records_to_csv(records: list[BenchRecord], *, with_elapsed: bool = True) -> str:
    cols = CSV_COLUMNS if with_elapsed else [c for c in CSV_COLUMNS if c != "elapsed_s"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in records:
        row = asdict(r)
        row["elapsed_s"] = f"{r.elapsed_s:.6f}"
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def synthetic_suite(seed: int = 7, per_size: int = 4):
    """Bench net plus a log whose executions span 4-12 events and 2-5 objects."""
    from .datasets import bench_net
    from .generate import NoiseSpec, generate_log

    an = bench_net()
    logs = []
    for items in range(1, 5):
        for noisy in (False, True):
            noise = NoiseSpec(remove_prob=0.1, replace_prob=0.1, insert_prob=0.1, seed=seed + items) if noisy else None
            logs.append(generate_log(an, per_size, {"package": (1, 1), "item": (items, items)}, noise, seed=seed * 100 + items))
    events, types = {}, {}
    for k, lg in enumerate(logs):
        rename = {o: f"s{k}.{o}" for o in lg.object_types}
        for ev in lg.events.values():
            eid = f"s{k}.{ev.id}"
            events[eid] = type(ev)(eid, ev.activity, ev.timestamp + k * 100_000_000, frozenset(rename[o] for o in ev.objects))
        types.update({rename[o]: t for o, t in lg.object_types.items()})
    # noise can split or stretch executions; keep those inside the target range
    keep = [
        px for px in extract_process_executions(EventLog(events, types))
        if 4 <= len(px.events) <= 12 and 2 <= len(px.objects) <= 5
    ]
    events = {e: events[e] for px in keep for e in px.events}
    types = {o: types[o] for px in keep for o in px.objects}
    return EventLog(events, types), an
