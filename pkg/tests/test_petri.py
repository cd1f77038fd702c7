import json
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocalign.errors import BindingNotEnabled, InputError, ResourceLimitExceeded
from ocalign.petri import (
    AcceptingNet,
    Binding,
    Marking,
    ObjectCentricPetriNet,
    check_well_formed,
    cons,
    dump_ocpn,
    enabled_bindings,
    fire,
    parse_ocpn,
    prod,
    replay,
)

# t joins one order with two items; u moves one item on alone
NET = ObjectCentricPetriNet(
    places={"o0": "order", "o1": "order", "i0": "item", "i1": "item", "i2": "item"},
    transitions={"t": "pack", "u": None},
    arcs={("o0", "t"): 1, ("t", "o1"): 1, ("i0", "t"): 2, ("t", "i1"): 2, ("i1", "u"): 1, ("u", "i2"): 1},
)
M0 = Marking.of([("o0", "a"), ("i0", "x"), ("i0", "y"), ("i0", "z")])


def test_adjacency():
    assert NET.preset("t") == {"o0": 1, "i0": 2}
    assert NET.postset("u") == {"i2": 1}
    assert NET.tpl("t") == {"order", "item"}
    assert NET.is_silent("u") and not NET.is_silent("t")
    assert NET.source_places() == ["i0", "o0"]
    assert NET.sink_places() == ["i2", "o1"]


def test_marking_algebra():
    m = Marking.of({("p", "a"): 2, ("q", "b"): 1})
    n = Marking.of([("p", "a")])
    assert n <= m and not m <= n
    assert (m - n) + n == m
    assert len(m) == 3
    assert m.objects() == {"a", "b"}
    assert Marking.of([("p", "a"), ("p", "a")]) == Marking.of({("p", "a"): 2})


def test_enabled_bindings_enumerates_item_pairs():
    got = enabled_bindings(NET, M0, "t")
    # 1 order times C(3, 2) item pairs, in lexicographic order
    assert [b.object_map["item"] for b in got] == [{"x", "y"}, {"x", "z"}, {"y", "z"}]
    assert all(b.object_map["order"] == {"a"} for b in got)
    assert enabled_bindings(NET, M0, "u") == []


def test_enabled_bindings_cap():
    with pytest.raises(ResourceLimitExceeded):
        enabled_bindings(NET, M0, "t", cap=2)


def test_fire_and_cons_prod():
    b = Binding.of("t", {"order": ["a"], "item": ["x", "y"]})
    assert cons(NET, b) == Counter({("o0", "a"): 1, ("i0", "x"): 1, ("i0", "y"): 1})
    assert prod(NET, b) == Counter({("o1", "a"): 1, ("i1", "x"): 1, ("i1", "y"): 1})
    m1 = fire(NET, M0, b)
    assert m1 == Marking.of([("o1", "a"), ("i1", "x"), ("i1", "y"), ("i0", "z")])
    with pytest.raises(BindingNotEnabled):
        fire(NET, m1, b)
    with pytest.raises(BindingNotEnabled):
        fire(NET, M0, Binding.of("t", {"order": ["a"], "item": ["x"]}))


def test_replay():
    an = AcceptingNet(NET, M0, Marking.of([("o1", "a"), ("i2", "x"), ("i1", "y"), ("i0", "z")]))
    seq = [Binding.of("t", {"order": ["a"], "item": ["x", "y"]}), Binding.of("u", {"item": ["x"]})]
    r = replay(an, seq)
    assert r.accepted and r.failed_at is None
    r = replay(an, seq[::-1])
    assert not r.accepted and r.failed_at == 0


def test_variable_arcs_refused_by_enumeration():
    net = ObjectCentricPetriNet({"p": "item", "q": "item"}, {"t": "a"}, {("p", "t"): 1, ("t", "q"): 1},
                                {("p", "t"): 1, ("t", "q"): 1})
    assert net.has_variable_arcs()
    with pytest.raises(InputError):
        enabled_bindings(net, Marking.of([("p", "x")]), "t")


def test_well_formedness():
    net = ObjectCentricPetriNet(
        {"p": "item", "q": "item", "r": "item"}, {"t": "a"},
        {("p", "t"): 1, ("q", "t"): 1, ("t", "r"): 1}, {("p", "t"): 1},
    )
    assert check_well_formed(net) == ["t"]


@pytest.mark.parametrize(
    "arcs, fragment",
    [
        ({("p", "q"): 1}, "does not connect"),
        ({("p", "t"): 0}, "positive integer weight"),
    ],
)
def test_net_validation(arcs, fragment):
    with pytest.raises(InputError, match=fragment):
        ObjectCentricPetriNet({"p": "a", "q": "a"}, {"t": "x"}, arcs)


def test_variable_exceeds_arcs():
    with pytest.raises(InputError, match="F_var exceeds F"):
        ObjectCentricPetriNet({"p": "a"}, {"t": "x"}, {("p", "t"): 1}, {("p", "t"): 2})


def test_parse_dump_roundtrip(packaging):
    _, an = packaging
    again = parse_ocpn(dump_ocpn(an))
    assert again.net == an.net


def test_parse_rejects_ill_formed():
    doc = {
        "places": [{"id": "p", "type": "a"}, {"id": "q", "type": "a"}],
        "transitions": [{"id": "t", "label": "x"}],
        "arcs": [{"source": "p", "target": "t", "variable": True}, {"source": "q", "target": "t"}],
    }
    with pytest.raises(InputError, match="not well-formed"):
        parse_ocpn(json.dumps(doc))
    with pytest.raises(InputError):
        parse_ocpn("{")


def test_marking_type_check():
    with pytest.raises(InputError):
        AcceptingNet(NET, Marking.of([("o0", "x"), ("i0", "x")]), Marking(()))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["x", "y", "z", "w"]), min_size=2, max_size=4, unique=True), st.data())
def test_firing_conserves_tokens_per_object(items, data):
    m = Marking.of([("o0", "a")] + [("i0", i) for i in items])
    b = data.draw(st.sampled_from(enabled_bindings(NET, m, "t")))
    m1 = fire(NET, m, b)
    assert len(m1) == len(m)
    before, after = Counter(o for _, o in m.tokens()), Counter(o for _, o in m1.tokens())
    assert before == after
    assert Marking.of(m.counts() - cons(NET, b) + prod(NET, b)) == m1
