#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
model.py - In-memory representation of a Thinging Machine document

A document holds the static model (nested thimacs with their actions and
storages, flow edges and trigger edges), the events carved from it, the
chronology over those events, and the annotations linking events to spans of
a domain text.

Element identity is the dotted containment path ("System.newSale.create").
Edges get synthetic ids ("flow:<src>-><dst>", "trigger:<src>--><dst>").
Documents are immutable once built; every query here is a pure function.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from core import SourceSpan, UnknownRefError


class ActionKind(enum.Enum):
    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"

    @property
    def elidable(self) -> bool:
        """Release, transfer and receive vanish in the simplified form"""
        return self in ELIDABLE_KINDS


ELIDABLE_KINDS = frozenset({ActionKind.RELEASE, ActionKind.TRANSFER, ActionKind.RECEIVE})


@dataclass(frozen=True)
class Thimac:
    id: str
    name: str
    owner: str = ""
    label: Optional[int] = None
    children: Tuple[str, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)
    decl: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class ActionNode:
    id: str
    name: str
    kind: ActionKind
    owner: str
    label: Optional[int] = None
    # render hint set by transform.mark_implicit
    implicit: bool = False
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)
    decl: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class StorageNode:
    id: str
    name: str
    owner: str
    label: Optional[int] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)
    decl: int = field(default=0, compare=False, repr=False)


Element = Union[Thimac, ActionNode, StorageNode]


@dataclass(frozen=True)
class FlowEdge:
    id: str
    src: str
    dst: str
    # thimac id the flow was declared in, "" for model level
    scope: str = ""
    elided_provenance: Tuple[str, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)
    decl: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class TriggerEdge:
    id: str
    src: str
    dst: str
    scope: str = ""
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)
    decl: int = field(default=0, compare=False, repr=False)


Edge = Union[FlowEdge, TriggerEdge]


@dataclass(frozen=True)
class Region:
    """A set of element ids closed under containment and edge endpoints"""
    elements: FrozenSet[str] = frozenset()

    def __contains__(self, element_id: str) -> bool:
        return element_id in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.elements))


@dataclass(frozen=True)
class Event:
    id: str
    description: str
    # references as declared: dotted node paths, or edge ids after simplification
    covers: Tuple[str, ...] = ()
    time: Optional[str] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Annotation:
    event: str
    spans: Tuple[Tuple[int, int], ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


# Behavior expressions (the chronology AST)

@dataclass(frozen=True)
class EventRef:
    event: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    items: Tuple["BehaviorExpr", ...]


@dataclass(frozen=True)
class Alt:
    branches: Tuple["BehaviorExpr", ...]


@dataclass(frozen=True)
class Loop:
    body: "BehaviorExpr"
    guard: Optional[str] = None


@dataclass(frozen=True)
class Par:
    branches: Tuple["BehaviorExpr", ...]


BehaviorExpr = Union[EventRef, Seq, Alt, Loop, Par]


def behavior_events(expr: BehaviorExpr) -> List[str]:
    """Event ids referenced by a behavior expression, in leaf order"""
    if isinstance(expr, EventRef):
        return [expr.event]
    if isinstance(expr, Seq):
        return [e for item in expr.items for e in behavior_events(item)]
    if isinstance(expr, (Alt, Par)):
        return [e for branch in expr.branches for e in behavior_events(branch)]
    if isinstance(expr, Loop):
        return behavior_events(expr.body)
    raise TypeError(f"not a behavior expression: {expr!r}")


def behavior_leaves(expr: BehaviorExpr) -> Iterator[EventRef]:
    if isinstance(expr, EventRef):
        yield expr
    elif isinstance(expr, Seq):
        for item in expr.items:
            yield from behavior_leaves(item)
    elif isinstance(expr, (Alt, Par)):
        for branch in expr.branches:
            yield from behavior_leaves(branch)
    elif isinstance(expr, Loop):
        yield from behavior_leaves(expr.body)


@dataclass(frozen=True)
class Document:
    name: str
    # thimacs, actions and storages keyed by id, in declaration order
    elements: Dict[str, Element] = field(default_factory=dict)
    roots: Tuple[str, ...] = ()
    flows: Tuple[FlowEdge, ...] = ()
    triggers: Tuple[TriggerEdge, ...] = ()
    events: Tuple[Event, ...] = ()
    chronology: Optional[BehaviorExpr] = None
    source: Optional[str] = None
    annotations: Tuple[Annotation, ...] = ()

    def get(self, element_id: str) -> Optional[Element]:
        return self.elements.get(element_id)

    def thimacs(self) -> List[Thimac]:
        return [e for e in self.elements.values() if isinstance(e, Thimac)]

    def actions(self) -> List[ActionNode]:
        return [e for e in self.elements.values() if isinstance(e, ActionNode)]

    def storages(self) -> List[StorageNode]:
        return [e for e in self.elements.values() if isinstance(e, StorageNode)]

    def edges(self) -> List[Edge]:
        return list(self.flows) + list(self.triggers)

    def edge(self, edge_id: str) -> Optional[Edge]:
        for edge in self.flows:
            if edge.id == edge_id:
                return edge
        for edge in self.triggers:
            if edge.id == edge_id:
                return edge
        return None

    def event(self, event_id: str) -> Optional[Event]:
        for event in self.events:
            if event.id == event_id:
                return event
        return None

    def event_ids(self) -> List[str]:
        return [e.id for e in self.events]

    def ancestors(self, element_id: str) -> List[str]:
        """Owner chain of an element, nearest first"""
        chain = []
        element = self.elements.get(element_id)
        while element is not None and element.owner:
            chain.append(element.owner)
            element = self.elements.get(element.owner)
        return chain

    def owner_of(self, element_id: str) -> str:
        element = self.elements.get(element_id)
        return element.owner if element is not None else ""

    def kind_of(self, element_id: str) -> Optional[str]:
        """'thimac', 'store' or the action kind value; None when unknown"""
        element = self.elements.get(element_id)
        if isinstance(element, ActionNode):
            return element.kind.value
        if isinstance(element, StorageNode):
            return "store"
        if isinstance(element, Thimac):
            return "thimac"
        return None


def iter_containment(doc: Document) -> Iterator[Tuple[int, Element]]:
    """Depth-first walk of the containment tree, yielding (depth, element)"""
    stack = [(0, root) for root in reversed(doc.roots)]
    while stack:
        depth, element_id = stack.pop()
        element = doc.elements[element_id]
        yield depth, element
        if isinstance(element, Thimac):
            stack.extend((depth + 1, child) for child in reversed(element.children))


def resolve_ref(doc: Document, path: str) -> str:
    """Return the id of the element whose containment path is `path`"""
    if not path or path not in doc.elements:
        raise UnknownRefError(path)
    return doc.elements[path].id


def region_of(doc: Document, seeds: Iterable[str]) -> Region:
    """
    Smallest region containing the seeds.

    Node seeds pull in their owner chain. Edge seeds pull in both endpoints
    (and their owner chains). Every edge whose endpoints are both inside is
    included.
    """
    nodes = set()
    for seed in seeds:
        if seed in doc.elements:
            nodes.add(seed)
            continue
        edge = doc.edge(seed)
        if edge is None:
            raise UnknownRefError(seed)
        for endpoint in (edge.src, edge.dst):
            if endpoint not in doc.elements:
                raise UnknownRefError(endpoint)
            nodes.add(endpoint)
    closed = set(nodes)
    for node in nodes:
        closed.update(doc.ancestors(node))
    for edge in doc.edges():
        if edge.src in closed and edge.dst in closed:
            closed.add(edge.id)
    return Region(frozenset(closed))


def event_region(doc: Document, event: Event) -> Region:
    return region_of(doc, event.covers)


@dataclass(frozen=True)
class Stats:
    thimacs: int
    actions: Dict[ActionKind, int]
    storages: int
    flows: int
    triggers: int
    events: int

    @property
    def total_actions(self) -> int:
        return sum(self.actions.values())

    def as_dict(self) -> Dict[str, int]:
        counts = {
            "thimacs": self.thimacs,
            "storages": self.storages,
            "flows": self.flows,
            "triggers": self.triggers,
            "events": self.events,
        }
        counts.update({kind.value: n for kind, n in self.actions.items()})
        return counts


def stats(doc: Document) -> Stats:
    actions = {kind: 0 for kind in ActionKind}
    for action in doc.actions():
        actions[action.kind] += 1
    return Stats(
        thimacs=len(doc.thimacs()),
        actions=actions,
        storages=len(doc.storages()),
        flows=len(doc.flows),
        triggers=len(doc.triggers),
        events=len(doc.events),
    )
