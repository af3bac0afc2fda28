# -*- coding: utf-8 -*-
"""
test_model.py - Document queries: references, regions, statistics
"""

import pytest

from core import UnknownRefError
from model import ActionKind, Region, event_region, iter_containment, region_of, resolve_ref, stats


def test_resolve_nested_thimac(sales):
    assert resolve_ref(sales, "System.newSale") == "System.newSale"
    assert sales.get("System.newSale").label == 4


def test_resolve_action_path(sales):
    assert resolve_ref(sales, "System.newSale.lineItem.soldItems") == "System.newSale.lineItem.soldItems"


@pytest.mark.parametrize("path", ["Casher.nonexistent", "", "System.", "System.newSale.missing"])
def test_resolve_unknown(sales, path):
    with pytest.raises(UnknownRefError):
        resolve_ref(sales, path)


def test_region_of_cashier_actions(sales):
    seeds = [a.id for a in sales.actions() if a.id.startswith("Cashier.")]
    region = region_of(sales, seeds)
    assert set(seeds) <= region.elements
    assert "Cashier" in region
    assert not any(e == "System" or e.startswith("System.") for e in region.elements)
    # edges inside the cashier are pulled in, boundary crossings are not
    assert "flow:Cashier.request.create->Cashier.request.release" in region
    assert "flow:Cashier.request.transfer->System.request.transfer" not in region


def test_region_of_edge_seed_pulls_endpoints(sales):
    region = region_of(sales, ["flow:Cashier.request.transfer->System.request.transfer"])
    assert {"Cashier.request.transfer", "System.request.transfer", "Cashier", "System"} <= region.elements
    assert "flow:Cashier.request.transfer->System.request.transfer" in region


def test_region_of_unknown_seed(sales):
    with pytest.raises(UnknownRefError):
        region_of(sales, ["flow:nowhere->else"])


def test_region_is_closed_under_ownership(h2s):
    for event in h2s.events:
        region = event_region(h2s, event)
        for element_id in region.elements:
            element = h2s.get(element_id)
            if element is not None and element.owner:
                assert element.owner in region


@pytest.mark.parametrize("case", ["sales", "h2s", "milk"])
def test_region_of_is_idempotent(corpus_docs, case):
    doc = corpus_docs[case]
    for event in doc.events:
        region = event_region(doc, event)
        assert region_of(doc, region.elements) == region


def test_region_of_is_monotone(sales):
    covers = [event.covers for event in sales.events]
    for smaller in covers:
        for other in covers:
            assert region_of(sales, smaller).elements <= region_of(sales, smaller + other).elements
        for cut in range(len(smaller)):
            assert region_of(sales, smaller[:cut]).elements <= region_of(sales, smaller).elements


def test_thimac_event_region(h2s):
    assert event_region(h2s, h2s.event("E1")) == Region(frozenset({"System"}))


@pytest.mark.parametrize("case, events", [("sales", 6), ("h2s", 17), ("milk", 26)])
def test_event_counts(corpus_docs, case, events):
    assert stats(corpus_docs[case]).events == events


def test_stats_counts_kinds(pipeline):
    counts = stats(pipeline)
    assert counts.thimacs == 2
    assert counts.storages == 1
    assert counts.flows == 6
    assert counts.triggers == 1
    assert counts.actions[ActionKind.TRANSFER] == 2
    assert counts.total_actions == 6
    assert counts.as_dict()["receive"] == 1


def test_ancestors_nearest_first(sales):
    assert sales.ancestors("System.newSale.lineItem.create") == ["System.newSale.lineItem", "System.newSale", "System"]
    assert sales.ancestors("System") == []


def test_containment_walk_is_depth_first(sales):
    walk = [(depth, element.id) for depth, element in iter_containment(sales)]
    assert walk[0] == (0, "User")
    assert (1, "System.newSale") in walk
    index = walk.index((1, "System.newSale"))
    assert walk[index + 1] == (2, "System.newSale.create")


def test_kind_of(sales):
    assert sales.kind_of("System") == "thimac"
    assert sales.kind_of("System.newSale.lineItem.soldItems") == "store"
    assert sales.kind_of("System.newSale.bill.calculate") == "process"
    assert sales.kind_of("nowhere") is None
