from helpers import chain_net, nopath_net, trace_px
from ocalign.alignment import Cost
from ocalign.oracle import brute_force_optimal, final_reachable, reachable_graph
from ocalign.product import prepare
from ocalign.search import bindings_to_alignment, align_execution
from ocalign.alignment import validate_alignment


def test_oracle_small_costs():
    sp = prepare(trace_px(["b"]), chain_net(["a"]))
    res = brute_force_optimal(sp)
    assert res.alignable and res.optimal_cost == Cost(2, 0)
    g = bindings_to_alignment(res.witness, sp, trace_px(["b"]))
    assert validate_alignment(trace_px(["b"]), chain_net(["a"]), g) == []


def test_oracle_graph_size():
    # one object, one event, one model step: 2 execution states times 2 model states
    sp = prepare(trace_px(["a"]), chain_net(["a"]))
    states, _ = reachable_graph(sp)[:2]
    assert len(states) == 4


def test_oracle_detects_no_path():
    sp = prepare(trace_px(["go"], obj="x", ot="a"), nopath_net())
    res = brute_force_optimal(sp)
    assert not res.alignable and res.optimal_cost is None
    assert not final_reachable(sp)


def test_oracle_matches_engine_on_running_example(packaging):
    px, an = packaging
    res = brute_force_optimal(prepare(px, an))
    assert res.optimal_cost == align_execution(px, an).cost == Cost(6, 0)
