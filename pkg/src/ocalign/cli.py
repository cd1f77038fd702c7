"""Command-line entry point: ``ocalign <subcommand> ...``.

Exit codes: 0 success, 2 unalignable, 3 resource cap, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .alignment import alignment_from_dict, alignment_to_dict
from .bench import bench, records_to_csv, synthetic_suite
from .dot import export_dot
from .errors import InputError, OcalignError, ResourceLimitExceeded
from .flatten import contradictions, flatten_align, object_views
from .generate import NoiseSpec, generate_log
from .log import extract_process_executions, parse_event_log, serialize_event_log
from .oracle import brute_force_optimal
from .petri import dump_ocpn, parse_ocpn
from .product import expand_variable_arcs, prepare, product_to_dict
from .search import Unalignable, align_execution, bindings_to_alignment

EXIT_OK, EXIT_UNALIGNABLE, EXIT_RESOURCE, EXIT_INPUT = 0, 2, 3, 4

logger = logging.getLogger("ocalign")


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load(args):
    log = parse_event_log(_read(args.log), strict=getattr(args, "strict", False)) if getattr(args, "log", None) else None
    net = parse_ocpn(_read(args.net)) if getattr(args, "net", None) else None
    return log, net


def _select(log, which: str):
    pxs = extract_process_executions(log)
    if which == "all":
        return list(enumerate(pxs))
    try:
        i = int(which)
    except ValueError:
        raise InputError(f"--execution must be an index or 'all', got {which!r}") from None
    if not 0 <= i < len(pxs):
        raise InputError(f"execution index {i} out of range (log has {len(pxs)})")
    return [(i, pxs[i])]


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _search_kwargs(args) -> dict:
    return dict(
        min_variable_count=args.min_variable_count,
        max_states=args.max_states,
        timeout=args.timeout_secs,
    )


def _align_one(job):
    index, px, net, kw = job
    entry = {"index": index, "objects": sorted(px.objects), "num_events": len(px.events)}
    try:
        res = align_execution(px, net, **kw)
    except Unalignable as exc:
        entry.update(status="unalignable", message=str(exc))
        if getattr(exc, "stats", None) is not None:
            entry["stats"] = exc.stats.to_dict(with_elapsed=False)
        return entry, None, EXIT_UNALIGNABLE
    except ResourceLimitExceeded as exc:
        entry.update(status="resource_cap", message=str(exc))
        return entry, None, EXIT_RESOURCE
    entry.update(
        status="aligned",
        alignment=alignment_to_dict(res.alignment),
        stats=res.stats.to_dict(with_elapsed=False),
    )
    row = {
        "execution": index,
        "num_events": len(px.events),
        "num_objects": len(px.objects),
        "visible_cost": res.cost.visible,
        "silent_cost": res.cost.silent,
        "expanded_states": res.stats.expanded_states,
        "generated_states": res.stats.generated_states,
        "status": "ok",
        "elapsed_s": res.stats.elapsed,
    }
    return entry, (res, row), EXIT_OK


def _worst(codes) -> int:
    codes = set(codes)
    for c in (EXIT_RESOURCE, EXIT_UNALIGNABLE):
        if c in codes:
            return c
    return EXIT_OK


def cmd_align(args) -> int:
    log, net = _load(args)
    jobs = [(i, px, net, _search_kwargs(args)) for i, px in _select(log, args.execution)]
    if args.workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_align_one, jobs))
    else:
        results = [_align_one(j) for j in jobs]
    results.sort(key=lambda r: r[0]["index"])

    if args.out == "dot":
        _emit("".join(export_dot(r[1][0].alignment) for r in results if r[1] is not None))
        for entry, _, code in results:
            if code:
                print(_dumps(entry), file=sys.stderr, end="")
    else:
        _emit(_dumps({"executions": [r[0] for r in results]}))
    if args.stats:
        from .bench import BenchRecord

        recs = []
        for entry, payload, _ in results:
            if payload is not None:
                recs.append(BenchRecord(**payload[1]))
            else:
                recs.append(BenchRecord(entry["index"], entry["num_events"], len(entry["objects"]), None, None, 0, 0,
                                        "unalignable" if entry["status"] == "unalignable" else "censored", 0.0))
        Path(args.stats).write_text(records_to_csv(recs), encoding="utf-8")
    return _worst(r[2] for r in results)


def cmd_oracle(args) -> int:
    log, net = _load(args)
    out, codes = [], []
    for i, px in _select(log, args.execution):
        sp = prepare(px, net, min_variable_count=args.min_variable_count)
        res = brute_force_optimal(sp, max_states=args.max_states)
        entry = {"index": i, "objects": sorted(px.objects), "explored": res.explored}
        if res.alignable:
            entry["status"] = "aligned"
            entry["cost"] = res.optimal_cost.to_dict()
            entry["alignment"] = alignment_to_dict(bindings_to_alignment(res.witness, sp, px))
        else:
            entry["status"] = "unalignable"
            codes.append(EXIT_UNALIGNABLE)
        if args.compare:
            try:
                eng = align_execution(px, net, **_search_kwargs(args))
                entry["engine_cost"] = eng.cost.to_dict()
                entry["agree"] = res.alignable and eng.cost == res.optimal_cost
            except Unalignable:
                entry["engine_cost"] = None
                entry["agree"] = not res.alignable
            if not entry["agree"]:
                codes.append(1)
        out.append(entry)
    _emit(_dumps({"executions": out}))
    return 1 if 1 in codes else _worst(codes)


def cmd_extract(args) -> int:
    log, _ = _load(args)
    doc = []
    for i, px in enumerate(extract_process_executions(log)):
        doc.append({
            "index": i,
            "objects": sorted(px.objects),
            "events": sorted(px.events),
            "edges": [list(e) for e in sorted(px.edges)],
        })
    _emit(_dumps({"executions": doc}), args.output)
    return EXIT_OK


def cmd_preprocess(args) -> int:
    log, net = _load(args)
    (_, px), = _select(log, args.execution)
    _emit(dump_ocpn(expand_variable_arcs(net, px, min_variable_count=args.min_variable_count)) + "\n", args.output)
    return EXIT_OK


def cmd_product(args) -> int:
    log, net = _load(args)
    (_, px), = _select(log, args.execution)
    sp = prepare(px, net, min_variable_count=args.min_variable_count)
    _emit(export_dot(sp) if args.out == "dot" else _dumps(product_to_dict(sp)), args.output)
    return EXIT_OK


def _parse_ranges(specs) -> dict[str, tuple[int, int]]:
    ranges = {}
    for spec in specs or []:
        try:
            ot, rng = spec.split("=", 1)
            lo, _, hi = rng.partition(":")
            ranges[ot] = (int(lo), int(hi or lo))
        except ValueError:
            raise InputError(f"--objects expects type=min:max, got {spec!r}") from None
    if not ranges:
        raise InputError("give at least one --objects type=min:max")
    return ranges


def cmd_generate(args) -> int:
    _, net = _load(args)
    noise = NoiseSpec(args.remove, args.replace, args.insert, seed=args.seed)
    log = generate_log(net, args.executions, _parse_ranges(args.objects), noise, seed=args.seed)
    _emit(serialize_event_log(log) + "\n", args.output)
    return EXIT_OK


def cmd_flatten(args) -> int:
    log, net = _load(args)
    (i, px), = _select(log, args.execution)
    flat = flatten_align(px, net, **_search_kwargs(args))
    doc = {
        "index": i,
        "per_object": {o: alignment_to_dict(r.alignment) for o, r in flat.per_object.items()},
        "contradictions": flat.contradictions,
    }
    try:
        oc = align_execution(px, net, **_search_kwargs(args))
        doc["object_centric"] = alignment_to_dict(oc.alignment)
        doc["object_centric_contradictions"] = contradictions(object_views(oc.alignment), px, net)
    except Unalignable as exc:
        doc["object_centric"] = None
        doc["object_centric_message"] = str(exc)
    _emit(_dumps(doc))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.synthetic:
        log, net = synthetic_suite(seed=args.seed)
    else:
        log, net = _load(args)
        if log is None or net is None:
            raise InputError("bench needs --log and --net, or --synthetic")
    records, slopes = bench(
        log, net,
        max_states=args.max_states, timeout=args.timeout_secs,
        min_variable_count=args.min_variable_count, workers=args.workers,
    )
    Path(args.csv).write_text(records_to_csv(records), encoding="utf-8")
    report = {k: ("undefined" if v is None else v) for k, v in slopes.items()}
    _emit(_dumps({"records": len(records), "log_time_slopes": report}))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    if args.alignment:
        g = alignment_from_dict(json.loads(_read(args.alignment)))
        _emit(export_dot(g), args.output)
        return EXIT_OK
    log, net = _load(args)
    if log is not None and net is not None and args.product:
        (_, px), = _select(log, args.execution)
        _emit(export_dot(prepare(px, net, min_variable_count=args.min_variable_count)), args.output)
    elif log is not None:
        (_, px), = _select(log, args.execution)
        _emit(export_dot(px), args.output)
    elif net is not None:
        _emit(export_dot(net), args.output)
    else:
        raise InputError("export-dot needs --log, --net, or --alignment")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ocalign", description="Object-centric alignments")
    sub = ap.add_subparsers(dest="command", required=True)

    def search_flags(p, execution_default="all"):
        p.add_argument("--log", required=True)
        p.add_argument("--net", required=True)
        p.add_argument("--execution", default=execution_default)
        p.add_argument("--max-states", type=int, default=5_000_000)
        p.add_argument("--timeout-secs", type=float, default=600.0)
        p.add_argument("--min-variable-count", type=int, choices=(0, 1), default=0)
        p.add_argument("--strict", action="store_true", help="reject unknown fields in the log")

    p = sub.add_parser("align", help="optimal alignment per process execution")
    search_flags(p)
    p.add_argument("--out", choices=("json", "dot"), default="json")
    p.add_argument("--stats", metavar="CSV")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("oracle", help="brute-force optimum for small instances")
    search_flags(p)
    p.set_defaults(max_states=200_000)
    p.add_argument("--compare", action="store_true", help="also run the engine and report agreement")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("extract", help="list process executions of a log")
    p.add_argument("--log", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extract)

    for name, func, help_ in (
        ("preprocess", cmd_preprocess, "expand variable arcs for one execution"),
        ("product", cmd_product, "synchronous product net for one execution"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--log", required=True)
        p.add_argument("--net", required=True)
        p.add_argument("--execution", default="0")
        p.add_argument("--min-variable-count", type=int, choices=(0, 1), default=0)
        p.add_argument("-o", "--output")
        if name == "product":
            p.add_argument("--out", choices=("json", "dot"), default="json")
        p.set_defaults(func=func)

    p = sub.add_parser("generate", help="simulate a log from a net, with optional noise")
    p.add_argument("--net", required=True)
    p.add_argument("--executions", type=int, default=10)
    p.add_argument("--objects", action="append", metavar="TYPE=MIN:MAX")
    p.add_argument("--remove", type=float, default=0.0)
    p.add_argument("--replace", type=float, default=0.0)
    p.add_argument("--insert", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("flatten-align", help="per-object baseline with contradiction report")
    search_flags(p, execution_default="0")
    p.set_defaults(func=cmd_flatten)

    p = sub.add_parser("bench", help="runtime scaling records and log-time slopes")
    p.add_argument("--log")
    p.add_argument("--net")
    p.add_argument("--synthetic", action="store_true", help="use the bundled synthetic suite")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--csv", required=True)
    p.add_argument("--max-states", type=int, default=5_000_000)
    p.add_argument("--timeout-secs", type=float, default=600.0)
    p.add_argument("--min-variable-count", type=int, choices=(0, 1), default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-dot", help="render an execution, net, product or alignment")
    p.add_argument("--log")
    p.add_argument("--net")
    p.add_argument("--alignment")
    p.add_argument("--product", action="store_true")
    p.add_argument("--execution", default="0")
    p.add_argument("--min-variable-count", type=int, choices=(0, 1), default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("OCALIGN_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OcalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
