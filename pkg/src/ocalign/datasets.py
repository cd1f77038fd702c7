"""Small bundled instances: the packaging example and a loan/offer example."""

from __future__ import annotations

import json

from .log import EventLog, parse_event_log
from .petri import AcceptingNet, parse_ocpn


def _arc(src, tgt, variable=False, weight=1):
    return {"source": src, "target": tgt, "weight": weight, "variable": variable}


PACKAGING_NET = {
    "places": [
        {"id": "pkg_start", "type": "package"},
        {"id": "pkg_sample", "type": "package"},
        {"id": "pkg_sample_ready", "type": "package"},
        {"id": "pkg_product", "type": "package"},
        {"id": "pkg_packed", "type": "package"},
        {"id": "pkg_end", "type": "package"},
        {"id": "item_start", "type": "item"},
        {"id": "item_sample", "type": "item"},
        {"id": "item_product", "type": "item"},
        {"id": "item_end", "type": "item"},
    ],
    "transitions": [
        {"id": "t1", "label": "receive sample order"},
        {"id": "t2", "label": "receive product order"},
        {"id": "t3", "label": "prepare sample package"},
        {"id": "t4", "label": "ship sample"},
        {"id": "t5", "label": "pack package"},
        {"id": "t6", "label": "ship package"},
        {"id": "t7", "label": "add sample"},
        {"id": "t8", "label": "add product"},
    ],
    "arcs": [
        _arc("pkg_start", "t1"), _arc("t1", "pkg_sample"),
        _arc("item_start", "t1", True), _arc("t1", "item_sample", True),
        _arc("pkg_start", "t2"), _arc("t2", "pkg_product"),
        _arc("item_start", "t2", True), _arc("t2", "item_product", True),
        _arc("pkg_sample", "t3"), _arc("t3", "pkg_sample_ready"),
        _arc("pkg_sample_ready", "t4"), _arc("t4", "pkg_end"),
        _arc("pkg_product", "t5"), _arc("t5", "pkg_packed"),
        _arc("pkg_packed", "t6"), _arc("t6", "pkg_end"),
        _arc("item_sample", "t7"), _arc("t7", "item_end"),
        _arc("item_product", "t8"), _arc("t8", "item_end"),
    ],
    "initial_marking": [],
    "final_marking": [],
}

# p1 with items i1 and i2: i1 never gets its sample, i2 gets two, and the
# package follows the product route after a sample order
PACKAGING_LOG = {
    "objects": [
        {"id": "p1", "type": "package"},
        {"id": "i1", "type": "item"},
        {"id": "i2", "type": "item"},
    ],
    "events": [
        {"id": "e1", "activity": "receive sample order", "timestamp": 1, "objects": ["p1", "i1", "i2"]},
        {"id": "e2", "activity": "add sample", "timestamp": 2, "objects": ["i2"]},
        {"id": "e3", "activity": "add sample", "timestamp": 3, "objects": ["i2"]},
        {"id": "e4", "activity": "pack package", "timestamp": 4, "objects": ["p1"]},
        {"id": "e5", "activity": "ship package", "timestamp": 5, "objects": ["p1"]},
    ],
}

LOAN_NET = {
    "places": [
        {"id": "app_start", "type": "application"},
        {"id": "app_open", "type": "application"},
        {"id": "app_accepted", "type": "application"},
        {"id": "app_validated", "type": "application"},
        {"id": "app_end", "type": "application"},
        {"id": "offer_start", "type": "offer"},
        {"id": "offer_open", "type": "offer"},
        {"id": "offer_cancelling", "type": "offer"},
        {"id": "offer_end", "type": "offer"},
    ],
    "transitions": [
        {"id": "create", "label": "Create offer"},
        {"id": "accept", "label": "Accept offer"},
        {"id": "validate", "label": "Validate"},
        {"id": "pending", "label": "Pending"},
        {"id": "cancel_app", "label": "Cancel application"},
        {"id": "cancel_offer", "label": "Cancel offer"},
    ],
    "arcs": [
        _arc("app_start", "create"), _arc("create", "app_open"),
        _arc("offer_start", "create", True), _arc("create", "offer_open", True),
        _arc("app_open", "accept"), _arc("accept", "app_accepted"),
        _arc("offer_open", "accept"), _arc("accept", "offer_end"),
        _arc("app_accepted", "validate"), _arc("validate", "app_validated"),
        _arc("app_validated", "pending"), _arc("pending", "app_end"),
        _arc("app_open", "cancel_app"), _arc("cancel_app", "app_end"),
        _arc("offer_open", "cancel_app", True), _arc("cancel_app", "offer_cancelling", True),
        _arc("offer_cancelling", "cancel_offer"), _arc("cancel_offer", "offer_end"),
    ],
    "initial_marking": [],
    "final_marking": [],
}

# "Accept offer" recorded on the application alone, the cancellations only
# on the offer
LOAN_LOG_NOISY = {
    "objects": [
        {"id": "application1", "type": "application"},
        {"id": "offer1", "type": "offer"},
    ],
    "events": [
        {"id": "a1", "activity": "Create offer", "timestamp": 1, "objects": ["application1", "offer1"]},
        {"id": "a2", "activity": "Accept offer", "timestamp": 2, "objects": ["application1"]},
        {"id": "a3", "activity": "Cancel application", "timestamp": 3, "objects": ["offer1"]},
        {"id": "a4", "activity": "Cancel offer", "timestamp": 4, "objects": ["offer1"]},
    ],
}


def packaging_net() -> AcceptingNet:
    return parse_ocpn(json.dumps(PACKAGING_NET))


def packaging_log() -> EventLog:
    return parse_event_log(json.dumps(PACKAGING_LOG))


def loan_net() -> AcceptingNet:
    return parse_ocpn(json.dumps(LOAN_NET))


def loan_log_noisy() -> EventLog:
    return parse_event_log(json.dumps(LOAN_LOG_NOISY))


def bench_net() -> AcceptingNet:
    """Packaging net where every item is also picked before its order step.

    Used by the scaling suite to get longer executions per object.
    """
    doc = json.loads(json.dumps(PACKAGING_NET))
    doc["places"].append({"id": "item_picked", "type": "item"})
    doc["transitions"].append({"id": "t0", "label": "pick item"})
    for arc in doc["arcs"]:
        if arc["source"] == "item_start":
            arc["source"] = "item_picked"
    doc["arcs"] += [_arc("item_start", "t0"), _arc("t0", "item_picked")]
    return parse_ocpn(json.dumps(doc))
