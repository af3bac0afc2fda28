# -*- coding: utf-8 -*-
"""
test_validator.py - Static and dynamic rule checks
"""

import itertools

import pytest

from core import Severity, has_errors
from dsl_parser import parse
from transform import simplify_level1
from validator import RULES, Mode, check_dynamic, check_static, flow_allowed, validate

KINDS = ("create", "process", "release", "transfer", "receive")

# Written out independently of validator.STRICT_ADJACENCY
LEGAL = {
    ("create", "process"), ("create", "release"),
    ("receive", "process"), ("receive", "release"),
    ("process", "release"),
    ("release", "transfer"),
    ("transfer", "transfer"), ("transfer", "receive"),
}


def two_node_model(src_kind, dst_kind, same_thimac=True):
    if same_thimac:
        body = (f"  thimac T {{\n    action a: {src_kind}\n    action b: {dst_kind}\n"
                f"    flow T.a -> T.b\n  }}\n")
        return parse(f'model "pair" {{\n{body}}}\n')
    body = (f"  thimac T {{\n    action a: {src_kind}\n  }}\n"
            f"  thimac U {{\n    action b: {dst_kind}\n  }}\n  flow T.a -> U.b\n")
    return parse(f'model "pair" {{\n{body}}}\n')


def rule_codes(diagnostics):
    return [d.code for d in diagnostics]


@pytest.mark.parametrize("src_kind, dst_kind", list(itertools.product(KINDS, KINDS)))
def test_strict_adjacency_is_exhaustive(src_kind, dst_kind):
    diagnostics = check_static(two_node_model(src_kind, dst_kind), Mode.STRICT)
    if (src_kind, dst_kind) in LEGAL:
        assert diagnostics == []
    else:
        assert rule_codes(diagnostics) == ["V3"]


def test_store_adjacency():
    for src, dst, ok in [("create", "store", True), ("receive", "store", True), ("process", "store", True),
                         ("store", "process", True), ("store", "release", True),
                         ("store", "transfer", False), ("release", "store", False), ("transfer", "store", False)]:
        assert flow_allowed(src, dst, Mode.STRICT) is ok, (src, dst)


def test_transfer_to_process_is_v3():
    assert rule_codes(check_static(two_node_model("transfer", "process"))) == ["V3"]


def test_crossing_other_than_transfer_is_v4():
    diagnostics = check_static(two_node_model("process", "receive", same_thimac=False))
    assert rule_codes(diagnostics) == ["V4"]
    assert diagnostics[0].severity is Severity.ERROR


def test_transfer_crossing_is_allowed():
    assert check_static(two_node_model("transfer", "transfer", same_thimac=False)) == []


def test_unresolved_endpoint_is_v1():
    doc = parse('model "m" { thimac T { action a: create } flow T.a -> T.missing }')
    assert rule_codes(check_static(doc)) == ["V1"]


def test_flow_into_thimac_is_v2():
    doc = parse('model "m" { thimac T { action a: create thimac U { } } flow T.a -> T.U }')
    assert rule_codes(check_static(doc)) == ["V2"]


def test_self_loop_is_v2():
    doc = parse('model "m" { thimac T { action a: process flow T.a -> T.a } }')
    assert rule_codes(check_static(doc)) == ["V2"]


@pytest.mark.parametrize("target, expected", [
    ("create", []), ("process", []), ("release", ["V5"]), ("transfer", ["V5"]), ("receive", ["V5"]),
])
def test_trigger_targets(target, expected):
    doc = parse(f'model "m" {{ thimac T {{ action a: process action b: {target} trigger T.a --> T.b }} }}')
    assert rule_codes(check_static(doc)) == expected


def test_trigger_on_store_is_v2():
    doc = parse('model "m" { thimac T { action a: process store s trigger T.a --> T.s } }')
    assert rule_codes(check_static(doc)) == ["V2"]


def test_triggers_may_cross_boundaries():
    doc = parse('model "m" { thimac T { action a: process } thimac U { action b: create } trigger T.a --> U.b }')
    assert check_static(doc) == []


def test_simplified_mode_rejects_elidable_nodes(pipeline):
    diagnostics = check_static(pipeline, Mode.SIMPLIFIED)
    assert rule_codes(diagnostics) == ["V6"] * 4


def test_simplified_mode_allows_free_flows():
    doc = parse('model "m" { thimac T { action a: process } thimac U { store s } flow T.a -> U.s flow U.s -> T.a }')
    assert check_static(doc, Mode.SIMPLIFIED) == []
    assert rule_codes(check_static(doc, Mode.STRICT)) == ["V4", "V4"]


@pytest.mark.parametrize("case", ["sales", "h2s", "milk"])
def test_corpus_is_strict_valid_without_warnings(corpus_docs, case):
    assert validate(corpus_docs[case], Mode.STRICT) == []


@pytest.mark.parametrize("case", ["sales", "h2s", "milk"])
def test_simplified_corpus_is_valid_in_simplified_mode(corpus_docs, case):
    simplified, _ = simplify_level1(corpus_docs[case])
    assert not has_errors(validate(simplified, Mode.SIMPLIFIED))


def test_unresolved_event_reference_is_v7():
    doc = parse('model "m" { thimac T { action a: create } event E1 "x" covers { T.b } }')
    assert rule_codes(check_dynamic(doc)) == ["V7"]


def test_undeclared_chronology_event_is_v8():
    doc = parse('model "m" { thimac T { action a: create } event E1 "x" covers { T.a } chronology { E1; E9 } }')
    diagnostics = check_dynamic(doc)
    assert rule_codes(diagnostics) == ["V8"]
    assert "E9" in diagnostics[0].message


def test_disconnected_region_is_v9_warning():
    doc = parse('model "m" { thimac T { action a: create } thimac U { action b: create }'
                ' event E1 "x" covers { T.a, U.b } }')
    diagnostics = check_dynamic(doc)
    assert rule_codes(diagnostics) == ["V9"]
    assert diagnostics[0].severity is Severity.WARNING
    assert not has_errors(diagnostics)


def test_identical_regions_are_v10_warning():
    doc = parse('model "m" { thimac T { action a: create } event E1 "x" covers { T.a }'
                ' event E2 "y" covers { T, T.a } }')
    assert rule_codes(check_dynamic(doc)) == ["V10"]


def test_annotation_of_undeclared_event_is_v11():
    doc = parse('model "m" { thimac T { action a: create } annotate E4 spans 0..1 }')
    assert rule_codes(check_dynamic(doc)) == ["V11"]


def test_dynamic_rules_wait_for_a_clean_static_model():
    doc = parse('model "m" { thimac T { action a: transfer action b: process flow T.a -> T.b }'
                ' chronology { E1 } }')
    assert rule_codes(validate(doc)) == ["V3"]


def test_validation_is_deterministic(h2s):
    assert validate(h2s) == validate(h2s)


def test_rule_catalog():
    assert sorted(RULES, key=lambda c: int(c[1:])) == [f"V{i}" for i in range(1, 12)]
    assert {c for c, r in RULES.items() if r.severity is Severity.WARNING} == {"V9", "V10"}
