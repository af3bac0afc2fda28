#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
dynamics.py - Chronology semantics: trace acceptance, next events, enumeration

The language of a behavior expression:

    EventRef e   {[e]}
    Seq          concatenation of the item languages, in order
    Alt          union of the branch languages
    Loop         one or more repetitions of the body (guards are documentation)
    Par          all interleavings of one trace per branch

Recognition steps derivatives: the derivative of an expression by event e
is an expression whose language is { t | [e] + t in language }. A prefix is
viable while its derivative is not the empty language.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from core import UnknownEventError
from model import Alt, BehaviorExpr, EventRef, Loop, Par, Seq, behavior_events

logger = logging.getLogger(__name__)

Trace = Tuple[str, ...]

# entries kept by each derivative cache
STATE_CACHE_SIZE = 4096


# Derivative states. Seq becomes a right-nested _Cat, Alt a _Choice over a
# frozenset, Loop body becomes body ; _Star(body).

@dataclass(frozen=True)
class _Null:
    pass


@dataclass(frozen=True)
class _Empty:
    pass


@dataclass(frozen=True)
class _Cat:
    head: "State"
    tail: "State"


@dataclass(frozen=True)
class _Choice:
    options: FrozenSet["State"]


@dataclass(frozen=True)
class _Star:
    body: "State"


@dataclass(frozen=True)
class _Shuffle:
    branches: Tuple["State", ...]


State = Union[_Null, _Empty, EventRef, _Cat, _Choice, _Star, _Shuffle]

NULL = _Null()
EMPTY = _Empty()


def _cat(head: State, tail: State) -> State:
    if head == NULL or tail == NULL:
        return NULL
    if head == EMPTY:
        return tail
    if tail == EMPTY:
        return head
    return _Cat(head, tail)


def _choice(options: Iterable[State]) -> State:
    flat: Set[State] = set()
    for option in options:
        if isinstance(option, _Choice):
            flat.update(option.options)
        elif option != NULL:
            flat.add(option)
    if not flat:
        return NULL
    if len(flat) == 1:
        return next(iter(flat))
    return _Choice(frozenset(flat))


def _shuffle(branches: Iterable[State]) -> State:
    kept = []
    for branch in branches:
        if branch == NULL:
            return NULL
        if branch != EMPTY:
            kept.append(branch)
    if not kept:
        return EMPTY
    if len(kept) == 1:
        return kept[0]
    return _Shuffle(tuple(kept))


@lru_cache(maxsize=STATE_CACHE_SIZE)
def compile_behavior(expr: BehaviorExpr) -> State:
    """Translate a behavior expression into an initial derivative state"""
    if isinstance(expr, EventRef):
        return EventRef(expr.event)
    if isinstance(expr, Seq):
        state = EMPTY
        for item in reversed(expr.items):
            state = _cat(compile_behavior(item), state)
        return state
    if isinstance(expr, Alt):
        return _choice(compile_behavior(b) for b in expr.branches)
    if isinstance(expr, Loop):
        body = compile_behavior(expr.body)
        return _cat(body, _Star(body))
    if isinstance(expr, Par):
        return _shuffle(compile_behavior(b) for b in expr.branches)
    raise TypeError(f"not a behavior expression: {expr!r}")


@lru_cache(maxsize=STATE_CACHE_SIZE)
def nullable(state: State) -> bool:
    """Whether the empty trace is in the state's language"""
    if isinstance(state, (_Empty, _Star)):
        return True
    if isinstance(state, (_Null, EventRef)):
        return False
    if isinstance(state, _Cat):
        return nullable(state.head) and nullable(state.tail)
    if isinstance(state, _Choice):
        return any(nullable(o) for o in state.options)
    if isinstance(state, _Shuffle):
        return all(nullable(b) for b in state.branches)
    raise TypeError(f"not a derivative state: {state!r}")


@lru_cache(maxsize=STATE_CACHE_SIZE)
def derive(state: State, event: str) -> State:
    if isinstance(state, (_Null, _Empty)):
        return NULL
    if isinstance(state, EventRef):
        return EMPTY if state.event == event else NULL
    if isinstance(state, _Cat):
        stepped = _cat(derive(state.head, event), state.tail)
        if nullable(state.head):
            return _choice((stepped, derive(state.tail, event)))
        return stepped
    if isinstance(state, _Choice):
        return _choice(derive(o, event) for o in state.options)
    if isinstance(state, _Star):
        return _cat(derive(state.body, event), state)
    if isinstance(state, _Shuffle):
        branches = state.branches
        return _choice(
            _shuffle(branches[:i] + (derive(b, event),) + branches[i + 1:])
            for i, b in enumerate(branches)
        )
    raise TypeError(f"not a derivative state: {state!r}")


@lru_cache(maxsize=STATE_CACHE_SIZE)
def first_events(state: State) -> FrozenSet[str]:
    """Events that can start a trace of the state's language"""
    if isinstance(state, (_Null, _Empty)):
        return frozenset()
    if isinstance(state, EventRef):
        return frozenset({state.event})
    if isinstance(state, _Cat):
        head = first_events(state.head)
        return head | first_events(state.tail) if nullable(state.head) else head
    if isinstance(state, _Choice):
        return frozenset().union(*(first_events(o) for o in state.options))
    if isinstance(state, _Star):
        return first_events(state.body)
    if isinstance(state, _Shuffle):
        return frozenset().union(*(first_events(b) for b in state.branches))
    raise TypeError(f"not a derivative state: {state!r}")


def _check_declared(trace: Sequence[str], declared: Iterable[str]) -> None:
    known = set(declared)
    for event in trace:
        if event not in known:
            raise UnknownEventError(event)


def _declared(chron: BehaviorExpr, declared: Optional[Iterable[str]]) -> Iterable[str]:
    return declared if declared is not None else behavior_events(chron)


def viable_prefix_length(chron: BehaviorExpr, trace: Sequence[str],
                         declared: Optional[Iterable[str]] = None) -> int:
    """Length of the longest prefix of `trace` that starts some accepted trace"""
    _check_declared(trace, _declared(chron, declared))
    state = compile_behavior(chron)
    for k, event in enumerate(trace):
        state = derive(state, event)
        if state == NULL:
            return k
    return len(trace)


def accepts_trace(chron: BehaviorExpr, trace: Sequence[str], declared: Optional[Iterable[str]] = None) -> bool:
    """Whether `trace` is in the language of `chron`"""
    _check_declared(trace, _declared(chron, declared))
    state = compile_behavior(chron)
    for event in trace:
        state = derive(state, event)
        if state == NULL:
            return False
    return nullable(state)


def next_events(chron: BehaviorExpr, prefix: Sequence[str],
                declared: Optional[Iterable[str]] = None) -> FrozenSet[str]:
    """Events e such that prefix + [e] starts some accepted trace"""
    _check_declared(prefix, _declared(chron, declared))
    state = compile_behavior(chron)
    for event in prefix:
        state = derive(state, event)
    return first_events(state)


@dataclass(frozen=True)
class TraceEnumeration:
    traces: List[Trace]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)


def _bounded(expr: BehaviorExpr, max_loop: int) -> State:
    """Derivative state of `expr` with each loop unrolled 1..max_loop times"""
    if isinstance(expr, EventRef):
        return EventRef(expr.event)
    if isinstance(expr, Seq):
        state = EMPTY
        for item in reversed(expr.items):
            state = _cat(_bounded(item, max_loop), state)
        return state
    if isinstance(expr, Alt):
        return _choice(_bounded(b, max_loop) for b in expr.branches)
    if isinstance(expr, Loop):
        body = _bounded(expr.body, max_loop)
        unrolled = body
        for _ in range(max_loop - 1):
            unrolled = _cat(body, _choice((EMPTY, unrolled)))
        return unrolled
    if isinstance(expr, Par):
        return _shuffle(_bounded(b, max_loop) for b in expr.branches)
    raise TypeError(f"not a behavior expression: {expr!r}")


def iter_traces(chron: BehaviorExpr, max_loop: int = 1) -> Iterator[Trace]:
    """
    Lazily yield every trace of `chron` with each loop unrolled 1..max_loop
    times, in sorted order and without repeats.

    Walks the prefix tree depth-first with children in event order, so a
    trace comes before its extensions.
    """
    stack: List[Tuple[Trace, State]] = [((), _bounded(chron, max_loop))]
    while stack:
        prefix, state = stack.pop()
        if nullable(state):
            yield prefix
        for event in sorted(first_events(state), reverse=True):
            successor = derive(state, event)
            if successor != NULL:
                stack.append((prefix + (event,), successor))


def enumerate_traces(chron: BehaviorExpr, max_loop: int = 1, max_traces: int = 1000) -> TraceEnumeration:
    """
    Every trace of `chron` with each loop unrolled 1..max_loop times,
    sorted and cut at max_traces. Stops after max_traces + 1 traces.
    """
    if max_loop < 1 or max_traces < 1:
        raise ValueError("max_loop and max_traces must be at least 1")
    traces = list(itertools.islice(iter_traces(chron, max_loop), max_traces + 1))
    truncated = len(traces) > max_traces
    if truncated:
        logger.warning(f"Trace enumeration truncated at {max_traces} traces")
    return TraceEnumeration(traces[:max_traces], truncated)


def parse_trace(text: str) -> List[str]:
    """Split the comma-separated trace format `E1,E2,E3`"""
    return [part.strip() for part in text.split(",") if part.strip()]
