"""Compare the numba and numpy successor kernels.

Two measurements per backend:

* raw kernel throughput on reachable markings of one product net;
* end-to-end ``search_optimal`` time on the same product.

Usage: python3 benchmarks/bench_kernels.py [--items N] [--repeat R]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from ocalign._kernels import HAVE_NUMBA, warmup
from ocalign.datasets import bench_net
from ocalign.generate import NoiseSpec, generate_log
from ocalign.log import extract_process_executions
from ocalign.product import prepare
from ocalign.search import compile_product, search_optimal


def sample_markings(cn, kernel, limit=2000):
    seen, out, frontier = set(), [], [cn.initial]
    while frontier and len(out) < limit:
        m = frontier.pop()
        key = m.tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append(m)
        _, nxt = kernel(m)
        frontier.extend(nxt)
    return out


def time_kernel(kernel, markings, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for m in markings:
            kernel(m)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--items", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    an = bench_net()
    log = generate_log(an, 1, {"package": (1, 1), "item": (args.items, args.items)},
                       NoiseSpec(0.1, 0.1, 0.1, seed=args.seed), seed=args.seed)
    px = max(extract_process_executions(log), key=lambda p: len(p.events))
    sp = prepare(px, an)
    cn = compile_product(sp)
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if HAVE_NUMBA:
        warmup("numba")

    markings = sample_markings(cn, cn.kernel("numpy"))
    report = {
        "events": len(px.events),
        "objects": len(px.objects),
        "ground_bindings": len(cn.bindings),
        "tokens": len(cn.tokens),
        "markings_sampled": len(markings),
    }
    costs = set()
    for be in backends:
        k = cn.kernel(be)
        ref = cn.kernel("numpy")
        for m in markings[:50]:
            a, b = k(m), ref(m)
            assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]), "backends disagree"
        report[f"{be}_kernel_s"] = time_kernel(k, markings, args.repeat)
        t0 = time.perf_counter()
        res = search_optimal(sp, backend=be, compiled=cn)
        report[f"{be}_search_s"] = time.perf_counter() - t0
        report[f"{be}_expanded"] = res.stats.expanded_states
        costs.add(tuple(res.cost))
    assert len(costs) == 1, "backends found different optimal costs"
    if HAVE_NUMBA:
        report["kernel_speedup"] = report["numpy_kernel_s"] / report["numba_kernel_s"]
        report["search_speedup"] = report["numpy_search_s"] / report["numba_search_s"]
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
