"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v`` (the lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py`` to print just the lines.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import nopath_net  # noqa: E402
from ocalign import datasets  # noqa: E402
from ocalign.alignment import Cost, MoveKind, validate_alignment  # noqa: E402
from ocalign.bench import bench, synthetic_suite  # noqa: E402
from ocalign.cli import main as cli_main  # noqa: E402
from ocalign.datasets import bench_net, loan_net, packaging_net  # noqa: E402
from ocalign.flatten import contradictions, flatten_align, object_views  # noqa: E402
from ocalign.generate import generate_log  # noqa: E402
from ocalign.instances import random_instances  # noqa: E402
from ocalign.log import extract_process_executions  # noqa: E402
from ocalign.oracle import brute_force_optimal  # noqa: E402
from ocalign.petri import dump_ocpn  # noqa: E402
from ocalign.product import prepare  # noqa: E402
from ocalign.search import Unalignable, align_execution, compile_product, count_reachable  # noqa: E402

RESULTS: list[str] = []

N_RANDOM = 120
N_PERFECT = 60
N_PRODUCT = 12


def record(n: int, ok: bool, detail: str) -> bool:
    RESULTS.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    print(RESULTS[-1])
    return ok


def _engine(px, an):
    try:
        return align_execution(px, an)
    except Unalignable:
        return None


@functools.lru_cache(maxsize=None)
def random_cases():
    """(instance, engine result, oracle result) for the criterion 1 instances."""
    out = []
    for inst in random_instances(N_RANDOM):
        oracle = brute_force_optimal(prepare(inst.execution, inst.net))
        out.append((inst, _engine(inst.execution, inst.net), oracle))
    return out


@functools.lru_cache(maxsize=None)
def perfect_cases():
    cases = []
    for seed, (net, ranges) in enumerate([
        (packaging_net(), {"package": (1, 1), "item": (1, 3)}),
        (loan_net(), {"application": (1, 1), "offer": (1, 3)}),
        (bench_net(), {"package": (1, 1), "item": (1, 3)}),
    ]):
        log = generate_log(net, N_PERFECT // 3, ranges, seed=100 + seed)
        cases += [(px, net) for px in extract_process_executions(log)]
    return [(px, net, align_execution(px, net)) for px, net in cases]


@functools.lru_cache(maxsize=None)
def running_example():
    net = datasets.packaging_net()
    (px,) = extract_process_executions(datasets.packaging_log())
    return px, net, align_execution(px, net), brute_force_optimal(prepare(px, net))


def test_criterion_1_oracle_equivalence():
    start = time.perf_counter()
    cases = random_cases()
    mismatches = []
    for inst, eng, orc in cases:
        e = eng.cost if eng is not None else None
        o = orc.optimal_cost if orc.alignable else None
        if e != o:
            mismatches.append((inst.seed, e, o))
    n_unalignable = sum(1 for _, eng, _ in cases if eng is None)
    elapsed = time.perf_counter() - start
    ok = not mismatches and len(cases) >= 100 and elapsed < 300
    assert record(1, ok, f"{len(cases)} instances, {n_unalignable} unalignable, "
                         f"{len(mismatches)} mismatches, {elapsed:.1f} s"), mismatches[:5]


def test_criterion_2_perfect_fit():
    start = time.perf_counter()
    cases = perfect_cases()
    bad = []
    for px, _, res in cases:
        visible = [m for m in res.alignment.moves if not m.is_silent]
        if res.cost.visible != 0 or any(m.kind is not MoveKind.SYNC for m in visible):
            bad.append(sorted(px.objects))
    elapsed = time.perf_counter() - start
    ok = not bad and len(cases) >= 50 and elapsed < 60
    assert record(2, ok, f"{len(cases)} zero-noise executions, {len(bad)} with visible deviations, {elapsed:.1f} s"), bad[:5]


def test_criterion_3_running_example():
    px, _, res, orc = running_example()
    ok = res.cost == orc.optimal_cost and res.cost.visible == 6
    assert record(3, ok, f"engine {tuple(res.cost)}, oracle {tuple(orc.optimal_cost)}, reference visible cost 6")


def test_criterion_4_alignment_validity():
    checked, failures = 0, []
    for inst, eng, _ in random_cases():
        if eng is not None:
            checked += 1
            v = validate_alignment(inst.execution, inst.net, eng.alignment)
            if v:
                failures.append((inst.seed, v))
    for px, net, res in perfect_cases():
        checked += 1
        v = validate_alignment(px, net, res.alignment)
        if v:
            failures.append((sorted(px.objects), v))
    px, net, res, _ = running_example()
    checked += 1
    v = validate_alignment(px, net, res.alignment)
    if v:
        failures.append(("running example", v))
    assert record(4, not failures, f"{checked} alignments checked, {len(failures)} invalid"), failures[:3]


def _px_universe(sp, px):
    u: dict[str, list[str]] = {}
    for o in sorted(px.objects):
        u.setdefault(sp.maps.new_type[o], []).append(sp.maps.new_obj[o])
    return u


def test_criterion_5_state_space_bounds():
    violations = []
    for inst, _, _ in random_cases():
        px = inst.execution
        sp = prepare(px, inst.net)
        n = count_reachable(sp.px_net, universe=_px_universe(sp, px))
        bound = (len(px.events) + 1) ** len(px.objects)
        if n > bound:
            violations.append((inst.seed, n, bound))
    product_checks, product_bad = 0, []
    for inst in random_instances(N_PRODUCT, start_seed=10_000, foreign_labels=True):
        px = inst.execution
        sp = prepare(px, inst.net)
        assert "sync" not in sp.tags.values()
        dj_universe: dict[str, list[str]] = {}
        for o in sorted(px.objects):
            dj_universe.setdefault(px.object_types[o], []).append(o)
        m_px = count_reachable(sp.px_net, universe=_px_universe(sp, px))
        m_dj = count_reachable(sp.dj_net, universe=dj_universe)
        m_sp = count_reachable(sp.net, compiled=compile_product(sp))
        product_checks += 1
        if m_sp != m_px * m_dj:
            product_bad.append((inst.seed, m_sp, m_px, m_dj))
    ok = not violations and not product_bad and product_checks >= 10
    assert record(5, ok, f"(e+1)^o bound held on {len(random_cases()) - len(violations)}/{len(random_cases())} execution nets; "
                         f"m_SP = m_PX * m_DJ on {product_checks - len(product_bad)}/{product_checks} products"), (violations, product_bad)


def test_criterion_6_no_path(tmp_path, capsys):
    log = tmp_path / "log.json"
    net = tmp_path / "net.json"
    log.write_text(json.dumps({
        "objects": [{"id": "x1", "type": "a"}],
        "events": [{"id": "e1", "activity": "go", "timestamp": 1, "objects": ["x1"]}],
    }))
    net.write_text(dump_ocpn(nopath_net()))
    code = cli_main(["align", "--log", str(log), "--net", str(net)])
    out = capsys.readouterr().out
    (entry,) = json.loads(out)["executions"]
    ok = code == 2 and entry["status"] == "unalignable" and bool(entry.get("message")) and "alignment" not in entry
    assert record(6, ok, f"exit code {code}, status {entry['status']!r}")


def test_criterion_7_scaling_trend():
    start = time.perf_counter()
    log, an = synthetic_suite()
    records, slopes = bench(log, an, timeout=120.0)
    elapsed = time.perf_counter() - start
    ev, ob = slopes["events"], slopes["objects"]
    sizes = {(r.num_events, r.num_objects) for r in records}
    ok = ev is not None and ob is not None and ev > 0 and ob > 0 and elapsed < 900
    assert record(7, ok, f"{len(records)} executions over events {min(s[0] for s in sizes)}-{max(s[0] for s in sizes)} "
                         f"and objects {min(s[1] for s in sizes)}-{max(s[1] for s in sizes)}; "
                         f"slope vs events {ev:.3f}, vs objects {ob:.3f}, {elapsed:.1f} s")


def test_criterion_8_flatten_contradictions():
    px, net, res, _ = running_example()
    flat = flatten_align(px, net)
    oc = contradictions(object_views(res.alignment), px, net)
    ok = bool(flat.contradictions) and not oc
    assert record(8, ok, f"{len(flat.contradictions)} contradictions in the flattened baseline, "
                         f"{len(oc)} in the object-centric alignment")


def _strip_elapsed(text: str) -> str:
    rows = list(csv.DictReader(io.StringIO(text)))
    buf = io.StringIO()
    if rows:
        cols = [c for c in rows[0] if c != "elapsed_s"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def test_criterion_9_determinism(tmp_path, capsys):
    log = tmp_path / "log.json"
    net = tmp_path / "net.json"
    gen = generate_log(packaging_net(), 6, {"package": (1, 1), "item": (1, 3)}, seed=21)
    from ocalign.log import serialize_event_log

    log.write_text(serialize_event_log(gen))
    net.write_text(json.dumps(datasets.PACKAGING_NET))
    outputs = []
    for run in range(2):
        stats = tmp_path / f"stats{run}.csv"
        bench_csv = tmp_path / f"bench{run}.csv"
        cli_main(["align", "--log", str(log), "--net", str(net), "--stats", str(stats)])
        align_out = capsys.readouterr().out
        cli_main(["bench", "--synthetic", "--seed", "7", "--csv", str(bench_csv)])
        capsys.readouterr()
        outputs.append((align_out, _strip_elapsed(stats.read_text()), _strip_elapsed(bench_csv.read_text())))
    same = [a == b for a, b in zip(*outputs)]
    assert record(9, all(same), "align JSON, align stats CSV, bench CSV identical across two runs: "
                                + ", ".join(str(s) for s in same))


if __name__ == "__main__":
    import pytest

    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
