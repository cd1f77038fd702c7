"""Tiny hand-built nets and logs shared by several test modules."""

from ocalign.log import Event, EventLog, extract_process_executions
from ocalign.petri import AcceptingNet, Marking, ObjectCentricPetriNet


def chain_net(labels, ot="case", silent=()):
    """Sequence net p0 -> t0 -> p1 -> ... for one object type."""
    places = {f"p{i}": ot for i in range(len(labels) + 1)}
    transitions = {f"t{i}": (None if i in silent else lab) for i, lab in enumerate(labels)}
    arcs = {}
    for i in range(len(labels)):
        arcs[(f"p{i}", f"t{i}")] = 1
        arcs[(f"t{i}", f"p{i + 1}")] = 1
    return AcceptingNet(ObjectCentricPetriNet(places, transitions, arcs), Marking(()), Marking(()))


def trace_px(acts, obj="c1", ot="case"):
    events = {f"e{i}": Event(f"e{i}", a, i, frozenset({obj})) for i, a in enumerate(acts)}
    (px,) = extract_process_executions(EventLog(events, {obj: ot}))
    return px


def nopath_net():
    """The only transition needs a 'b' object next to the 'a' one."""
    net = ObjectCentricPetriNet(
        {"a_src": "a", "a_sink": "a", "b_src": "b", "b_sink": "b"},
        {"t1": "go"},
        {("a_src", "t1"): 1, ("t1", "a_sink"): 1, ("b_src", "t1"): 1, ("t1", "b_sink"): 1},
    )
    return AcceptingNet(net, Marking(()), Marking(()))
