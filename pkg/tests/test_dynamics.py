# -*- coding: utf-8 -*-
"""
test_dynamics.py - Trace acceptance, next events and enumeration
"""

import itertools

import pytest

from core import UnknownEventError
from dsl_parser import parse
from dynamics import (
    STATE_CACHE_SIZE, accepts_trace, compile_behavior, derive, enumerate_traces, first_events, iter_traces, next_events,
    nullable, parse_trace, viable_prefix_length,
)
from model import Alt, EventRef, Loop, Seq

SALES = ["E1", "E2", "E3", "E4", "E5", "E6"]
H2S_HEAD = ["E1", "E2", "E4", "E3", "E5", "E6", "E7"]


def chron(text):
    return parse(f'model "m" {{ chronology {{ {text} }} }}').chronology


def test_sales_order_is_accepted(sales):
    assert accepts_trace(sales.chronology, SALES, sales.event_ids())


@pytest.mark.parametrize("i", range(5))
def test_adjacent_transpositions_are_rejected(sales, i):
    trace = list(SALES)
    trace[i], trace[i + 1] = trace[i + 1], trace[i]
    assert not accepts_trace(sales.chronology, trace, sales.event_ids())


def test_prefixes_are_not_traces(sales):
    assert not accepts_trace(sales.chronology, SALES[:-1])
    assert not accepts_trace(sales.chronology, [])


def test_unknown_event_raises(sales):
    with pytest.raises(UnknownEventError):
        accepts_trace(sales.chronology, ["E1", "E7"], sales.event_ids())
    with pytest.raises(UnknownEventError):
        next_events(sales.chronology, ["E99"])


def test_declared_but_unused_event_is_rejected_not_unknown():
    c = chron("E1; E2")
    assert not accepts_trace(c, ["E1", "E3"], ["E1", "E2", "E3"])


def test_h2s_resident_branch(h2s):
    trace = H2S_HEAD + ["E8", "E9", "E10", "E11", "E12", "E13"]
    assert accepts_trace(h2s.chronology, trace, h2s.event_ids())


def test_h2s_loop_repeats(h2s):
    trace = H2S_HEAD + ["E8", "E9", "E10"] * 3 + ["E11", "E12", "E13"]
    assert accepts_trace(h2s.chronology, trace, h2s.event_ids())


def test_h2s_loop_runs_at_least_once(h2s):
    assert not accepts_trace(h2s.chronology, H2S_HEAD + ["E11", "E12", "E13"], h2s.event_ids())


def test_h2s_branches_are_exclusive(h2s):
    for trace in enumerate_traces(h2s.chronology, max_loop=2).traces:
        assert not ("E8" in trace and "E14" in trace)
    mixed = H2S_HEAD + ["E8", "E9", "E10", "E14", "E15", "E16", "E17"]
    assert not accepts_trace(h2s.chronology, mixed, h2s.event_ids())


def test_next_events(sales, h2s):
    assert next_events(sales.chronology, []) == {"E1"}
    assert next_events(sales.chronology, ["E6"]) == frozenset()
    assert next_events(h2s.chronology, H2S_HEAD) == {"E8", "E14"}
    assert next_events(h2s.chronology, H2S_HEAD + ["E8", "E9", "E10"]) == {"E8", "E11"}


def test_next_events_of_parallel_tail(milk):
    prefix = [f"E{i}" for i in range(1, 24)]
    assert next_events(milk.chronology, prefix) == {"E24", "E25", "E26"}
    assert next_events(milk.chronology, prefix + ["E25"]) == {"E24", "E26"}


def test_viable_prefix_length(sales):
    assert viable_prefix_length(sales.chronology, ["E1", "E2", "E4"]) == 2
    assert viable_prefix_length(sales.chronology, SALES) == 6
    assert viable_prefix_length(sales.chronology, ["E2"]) == 0


def test_h2s_enumerates_one_trace_per_branch(h2s):
    result = enumerate_traces(h2s.chronology, max_loop=1)
    assert not result.truncated
    assert result.traces == [
        tuple(H2S_HEAD + ["E14", "E15", "E16", "E17"]),
        tuple(H2S_HEAD + ["E8", "E9", "E10", "E11", "E12", "E13"]),
    ]


def test_milk_enumerates_every_interleaving(milk):
    traces = enumerate_traces(milk.chronology).traces
    tails = [t[23:] for t in traces]
    assert tails == sorted(itertools.permutations(("E24", "E25", "E26")))


@pytest.mark.parametrize("case, max_loop", [("sales", 1), ("h2s", 1), ("h2s", 3), ("milk", 1)])
def test_enumerated_traces_are_accepted(corpus_docs, case, max_loop):
    doc = corpus_docs[case]
    for trace in enumerate_traces(doc.chronology, max_loop=max_loop).traces:
        assert accepts_trace(doc.chronology, trace, doc.event_ids())


def test_enumeration_agrees_with_acceptance_on_small_alphabet():
    c = chron('E1; alt { E2 | loop { E3 } }; par { E4 | E5 }')
    listed = set(enumerate_traces(c, max_loop=2).traces)
    alphabet = ["E1", "E2", "E3", "E4", "E5"]
    for length in range(1, 6):
        for trace in itertools.product(alphabet, repeat=length):
            loops = trace.count("E3")
            if loops <= 2:
                assert accepts_trace(c, trace) == (trace in listed), trace


def test_loop_unrolling_bound():
    c = chron("loop { E1 }")
    assert enumerate_traces(c, max_loop=3).traces == [("E1",), ("E1", "E1"), ("E1", "E1", "E1")]


def test_truncation(milk):
    result = enumerate_traces(milk.chronology, max_traces=4)
    assert result.truncated
    assert len(result) == 4


@pytest.mark.parametrize("max_loop, max_traces", [(0, 10), (1, 0)])
def test_enumeration_bounds_are_checked(sales, max_loop, max_traces):
    with pytest.raises(ValueError):
        enumerate_traces(sales.chronology, max_loop, max_traces)


def test_nested_parallel_and_choice():
    c = chron("par { E1; E2 | alt { E3 | E4 } }")
    assert accepts_trace(c, ["E1", "E4", "E2"])
    assert accepts_trace(c, ["E3", "E1", "E2"])
    assert not accepts_trace(c, ["E2", "E1", "E3"])
    assert not accepts_trace(c, ["E1", "E2", "E3", "E4"])
    assert len(enumerate_traces(c).traces) == 6


def test_parse_trace():
    assert parse_trace("E1, E2 ,E3") == ["E1", "E2", "E3"]
    assert parse_trace("") == []


def brute_force_language(expr, max_loop):
    """Every trace of `expr` built as explicit sets, loops unrolled 1..max_loop times"""
    if isinstance(expr, EventRef):
        return {(expr.event,)}
    if isinstance(expr, Seq):
        traces = {()}
        for item in expr.items:
            traces = {x + y for x in traces for y in brute_force_language(item, max_loop)}
        return traces
    if isinstance(expr, Alt):
        return set().union(*(brute_force_language(b, max_loop) for b in expr.branches))
    if isinstance(expr, Loop):
        body = brute_force_language(expr.body, max_loop)
        traces, unrolled = set(body), body
        for _ in range(max_loop - 1):
            unrolled = {x + y for x in unrolled for y in body}
            traces |= unrolled
        return traces
    traces = {()}
    for branch in expr.branches:
        branch_traces = brute_force_language(branch, max_loop)
        traces = {t for x in traces for y in branch_traces for t in interleavings(x, y)}
    return traces


def interleavings(a, b):
    if not a:
        return {b}
    if not b:
        return {a}
    return {(a[0],) + t for t in interleavings(a[1:], b)} | {(b[0],) + t for t in interleavings(a, b[1:])}


@pytest.mark.parametrize("text, max_loop", [
    ("E1; alt { E2 | loop { E3 } }; par { E4 | E5 }", 2),
    ("loop { alt { E1 | E1; E1 } }", 3),
    ("par { loop { E1; E2 } | E3; E4 }", 2),
    ("loop { E1; loop { E2 } }; alt { E10 | E9 }", 2),
])
def test_enumeration_matches_brute_force(text, max_loop):
    c = chron(text)
    assert enumerate_traces(c, max_loop=max_loop, max_traces=100000).traces == \
        sorted(brute_force_language(c, max_loop))


@pytest.mark.parametrize("case, max_loop", [("h2s", 2), ("milk", 1)])
def test_corpus_enumeration_matches_brute_force(corpus_docs, case, max_loop):
    c = corpus_docs[case].chronology
    assert enumerate_traces(c, max_loop=max_loop).traces == sorted(brute_force_language(c, max_loop))


def test_truncated_enumeration_stops_early():
    events = [f"E{i}" for i in range(12)]
    c = chron("par { " + " | ".join(events) + " }")
    result = enumerate_traces(c, max_traces=5)
    assert result.truncated
    assert result.traces == list(itertools.islice(itertools.permutations(events), 5))
    assert next(iter_traces(c)) == tuple(events)


def test_derivative_caches_are_bounded():
    for cached in (compile_behavior, nullable, derive, first_events):
        assert cached.cache_info().maxsize == STATE_CACHE_SIZE


def test_first_trace_of_wide_parallel_is_cheap():
    c = chron("par { E1; E2; E3 | E4; E5; E6 | E7; E8; E9 | F1; F2; F3 }")
    result = enumerate_traces(c, max_traces=1)
    assert result.truncated
    assert result.traces == [("E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "E9", "F1", "F2", "F3")]
