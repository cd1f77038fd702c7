import pytest

from ocalign.errors import InputError, ResourceLimitExceeded
from ocalign.log import Event, EventLog, extract_process_executions
from ocalign.petri import AcceptingNet, Binding, Marking, ObjectCentricPetriNet, enabled_bindings, fire
from ocalign.product import (
    build_px_net,
    expand_variable_arcs,
    expanded_id,
    generate_fresh_ids,
    nu_valid,
    prepare,
    product_to_dict,
    valid_bindings_sp,
)


def test_fresh_ids_avoid_collisions():
    log = EventLog({"e": Event("e", "A", 0, frozenset({"a", "a@px"}))}, {"a": "t", "a@px": "t"})
    (px,) = extract_process_executions(log)
    maps = generate_fresh_ids(px)
    assert maps.new_obj["a"] == "a@px2"
    assert len(set(maps.new_obj.values()) | set(maps.new_type.values())) == 4
    assert all(maps.orob[maps.new_obj[o]] == o for o in px.objects)
    assert all(maps.orty[maps.new_type[o]] == "t" for o in px.objects)


def test_px_net_is_one_path_per_object(packaging):
    px, _ = packaging
    maps = generate_fresh_ids(px)
    an = build_px_net(px, maps)
    # places: one per trace step plus one, per object
    assert len(an.net.places) == sum(len(px.traces[o]) + 1 for o in px.objects)
    assert set(an.net.transitions) == set(px.events)
    assert len(an.initial) == len(an.final) == len(px.objects)
    for t in an.net.transitions:
        assert {an.net.places[p] for p in an.net.preset(t)} == {maps.new_type[o] for o in px.events[t].objects}


def test_expand_variable_arcs(packaging):
    px, an = packaging
    dj = expand_variable_arcs(an, px)
    # t1 and t2 each become copies for 0, 1, 2 items
    assert sorted(t for t in dj.net.transitions if t.startswith(("t1", "t2"))) == [
        "t1[item=0]", "t1[item=1]", "t1[item=2]", "t2[item=0]", "t2[item=1]", "t2[item=2]",
    ]
    assert dj.net.preset("t1[item=2]") == {"pkg_start": 1, "item_start": 2}
    assert dj.net.preset("t1[item=0]") == {"pkg_start": 1}
    assert not dj.net.has_variable_arcs()
    assert dj.initial == Marking.of([("pkg_start", "p1"), ("item_start", "i1"), ("item_start", "i2")])
    assert dj.final == Marking.of([("pkg_end", "p1"), ("item_end", "i1"), ("item_end", "i2")])
    dj1 = expand_variable_arcs(an, px, min_variable_count=1)
    assert "t1[item=0]" not in dj1.net.transitions and "t1[item=1]" in dj1.net.transitions
    with pytest.raises(ResourceLimitExceeded):
        expand_variable_arcs(an, px, cap=3)


def test_expanded_id():
    assert expanded_id("t", {}) == "t"
    assert expanded_id("t", {"b": 2, "a": 0}) == "t[a=0,b=2]"


def test_product_shape(packaging):
    px, an = packaging
    sp = prepare(px, an)
    tags = list(sp.tags.values())
    assert tags.count("log") == 5
    assert tags.count("model") == 12
    assert tags.count("sync") == 5
    sync_pairs = sorted(o for t, o in sp.origin.items() if sp.tags[t] == "sync")
    assert sync_pairs == [("e1", "t1[item=2]"), ("e2", "t7"), ("e3", "t7"), ("e4", "t5"), ("e5", "t6")]
    assert sp.px_places.isdisjoint(sp.dj_places)
    doc = product_to_dict(sp)
    assert len(doc["nu"]) > 0


def test_nu_forces_same_objects(packaging):
    px, an = packaging
    sp = prepare(px, an)
    t = "(e2,t7)"
    i2 = sp.maps.new_obj["i2"]
    (b1,) = valid_bindings_sp(sp, sp.net.initial, "(e1,t1[item=2])")
    m = fire(sp.net.net, sp.net.initial, b1)
    cands = enabled_bindings(sp.net.net, m, t, universe=sp.objects)
    good = [b for b in cands if nu_valid(sp, b)]
    assert len(cands) == 2 and len(good) == 1
    assert good[0].object_map[sp.maps.new_type["i2"]] == {i2}
    assert good[0].object_map["item"] == {"i2"}
    assert valid_bindings_sp(sp, m, t) == good
    assert nu_valid(sp, Binding.of("(e2,>>)", {sp.maps.new_type["i2"]: [i2]}))


def test_multi_object_sync_uses_type_totals():
    # one de-jure arc of weight 2 must match two execution objects of that type
    net = ObjectCentricPetriNet({"a": "item", "b": "item"}, {"t": "x"}, {("a", "t"): 2, ("t", "b"): 2})
    an = AcceptingNet(net, Marking(()), Marking(()))
    log = EventLog({"e": Event("e", "x", 0, frozenset({"i1", "i2"}))}, {"i1": "item", "i2": "item"})
    (px,) = extract_process_executions(log)
    sp = prepare(px, an)
    assert [t for t, tag in sp.tags.items() if tag == "sync"] == ["(e,t)"]


def test_empty_trace_rejected(packaging):
    px, _ = packaging
    maps = generate_fresh_ids(px)
    broken = type(px)(px.objects, px.object_types, px.events, px.edges, {**px.traces, "i1": ()})
    with pytest.raises(InputError):
        build_px_net(broken, maps)
