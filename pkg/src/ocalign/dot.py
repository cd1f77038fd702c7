"""Graphviz DOT rendering for executions, nets, products and alignments."""

from __future__ import annotations

from .alignment import AlignmentGraph, MoveKind
from .log import ProcessExecution
from .petri import AcceptingNet
from .product import SyncProductNet

_PALETTE = ["#8fd18f", "#8fb8e8", "#f2c57c", "#d9a0e0", "#f0a0a0", "#a0e0e0", "#e0e08f", "#c0c0c0"]


def _q(s) -> str:
    return '"' + str(s).replace('"', '\\"').replace("\n", "\\n") + '"'


def _type_colors(types) -> dict[str, str]:
    return {ot: _PALETTE[i % len(_PALETTE)] for i, ot in enumerate(sorted(types))}


def execution_dot(px: ProcessExecution) -> str:
    lines = ["digraph execution {", "  rankdir=LR;", "  node [shape=box, style=rounded];"]
    for eid in sorted(px.events, key=lambda e: (px.events[e].timestamp, e)):
        ev = px.events[eid]
        lines.append(f"  {_q(eid)} [label={_q(ev.activity + chr(10) + ', '.join(sorted(ev.objects)))}];")
    for a, b in sorted(px.edges):
        shared = sorted(px.events[a].objects & px.events[b].objects)
        lines.append(f"  {_q(a)} -> {_q(b)} [label={_q(', '.join(shared))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _net_body(an: AcceptingNet, colors, prefix="  ", place_ids=None, transition_ids=None):
    net = an.net
    lines = []
    init = an.initial.counts()
    for p in sorted(place_ids if place_ids is not None else net.places):
        toks = sorted(o for (q, o) in init if q == p)
        label = p + ("\n" + ",".join(toks) if toks else "")
        lines.append(f"{prefix}{_q(p)} [shape=circle, style=filled, fillcolor={_q(colors[net.places[p]])}, label={_q(label)}];")
    for t in sorted(transition_ids if transition_ids is not None else net.transitions):
        lab = net.transitions[t]
        style = "filled" if lab is None else "solid"
        lines.append(f"{prefix}{_q(t)} [shape=box, style={style}, fillcolor=black, label={_q(lab or '')}, xlabel={_q(t)}];")
    return lines


def _arc_lines(an: AcceptingNet, keep=None):
    net = an.net
    lines = []
    for (src, tgt) in sorted(net.arcs):
        if keep is not None and not keep(src, tgt):
            continue
        w = net.arcs[(src, tgt)]
        attrs = []
        if w > 1:
            attrs.append(f"label={_q(w)}")
        if net.variable_arcs.get((src, tgt)):
            attrs += ["color=red", "penwidth=2"]
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_q(src)} -> {_q(tgt)}{suffix};")
    return lines


def net_dot(an: AcceptingNet) -> str:
    colors = _type_colors(an.net.types)
    lines = ["digraph net {", "  rankdir=LR;"] + _net_body(an, colors) + _arc_lines(an) + ["}"]
    return "\n".join(lines) + "\n"


def product_dot(sp: SyncProductNet) -> str:
    an = sp.net
    colors = _type_colors(an.net.types)
    lines = ["digraph product {", "  rankdir=LR;", "  compound=true;"]
    regions = [
        ("log", "log part", sp.px_places, "log"),
        ("sync", "synchronous part", frozenset(), "sync"),
        ("model", "model part", sp.dj_places, "model"),
    ]
    for name, title, places, tag in regions:
        ts = [t for t in an.net.transitions if sp.tags[t] == tag]
        lines.append(f"  subgraph cluster_{name} {{")
        lines.append(f"    label={_q(title)}; style=dashed;")
        lines += _net_body(an, colors, prefix="    ", place_ids=places, transition_ids=ts)
        lines.append("  }")
    lines += _arc_lines(an)
    for (p, t), var in sorted(sp.nu.items()):
        lines.append(f"  {_q(p)} -> {_q(t)} [style=invis, xlabel={_q(var)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def alignment_dot(g: AlignmentGraph) -> str:
    fill = {MoveKind.SYNC: "#c8e6c9", MoveKind.LOG: "#fff3b0", MoveKind.MODEL: "#f8c8c8"}
    lines = ["digraph alignment {", "  rankdir=LR;", "  node [shape=record, style=filled];"]
    for m in g.moves:
        top = f"{m.log_activity}\n{', '.join(sorted(m.log_objects))}" if m.has_log else ">>"
        if m.has_model:
            bottom = f"{m.model_label or 'τ'} ({m.model_transition})\n{', '.join(sorted(m.model_objects))}"
        else:
            bottom = ">>"
        label = "{" + _esc(top) + "|" + _esc(bottom) + "}"
        lines.append(f"  {_q(m.id)} [label={_q(label)}, fillcolor={_q(fill[m.kind])}];")
    for a, b in sorted(g.edges):
        lines.append(f"  {_q(a)} -> {_q(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _esc(s: str) -> str:
    for ch in "{}<>|":
        s = s.replace(ch, "\\" + ch)
    return s


def export_dot(artifact) -> str:
    if isinstance(artifact, ProcessExecution):
        return execution_dot(artifact)
    if isinstance(artifact, SyncProductNet):
        return product_dot(artifact)
    if isinstance(artifact, AcceptingNet):
        return net_dot(artifact)
    if isinstance(artifact, AlignmentGraph):
        return alignment_dot(artifact)
    raise TypeError(f"cannot render {type(artifact).__name__} as DOT")
