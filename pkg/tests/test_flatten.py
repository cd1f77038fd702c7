from ocalign.alignment import MoveKind
from ocalign.flatten import contradictions, flatten_align, object_views, project_net
from ocalign.search import align_execution


def test_project_net(packaging):
    _, an = packaging
    sub = project_net(an, "item")
    assert set(sub.net.places) == {"item_start", "item_sample", "item_product", "item_end"}
    assert set(sub.net.transitions) == {"t1", "t2", "t7", "t8"}
    assert not sub.net.has_variable_arcs()


def test_running_example_contradictions(packaging):
    px, an = packaging
    flat = flatten_align(px, an)
    assert flat.contradictions
    # the items take the sample route while the package takes the product route
    assert any("receive sample order" in c for c in flat.contradictions)
    oc = align_execution(px, an)
    assert contradictions(object_views(oc.alignment), px, an) == []


def test_loan_contradictions(loan):
    px, an = loan
    flat = flatten_align(px, an)
    assert flat.contradictions
    oc = align_execution(px, an)
    assert contradictions(object_views(oc.alignment), px, an) == []
    # flattening is never more expensive per object than the joint alignment in total
    assert flat.visible_cost <= oc.cost.visible


def test_flatten_per_object_alignments_are_single_object(packaging):
    px, an = packaging
    flat = flatten_align(px, an)
    for o, res in flat.per_object.items():
        for m in res.alignment.moves:
            assert (m.log_objects | m.model_objects) <= {o}
            assert m.kind in MoveKind
