#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
layout.py - Render options, view checks and layout shared by the DOT and SVG generators

Ranking is longest-path over flow edges (cycles are collapsed to one rank
through the networkx condensation), followed by one barycenter pass that
orders every rank by the mean position of its predecessors. The static
layout nests thimac boxes: the thimac's own actions and storages sit in
rank columns, nested thimacs follow in a row underneath.
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from core import ViewError
from model import (
    ActionKind, ActionNode, Alt, BehaviorExpr, Document, Event, EventRef, Loop, Par, Seq,
    StorageNode, Thimac,
)

logger = logging.getLogger(__name__)


class View(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"
    CHRONOLOGY = "chronology"


class Format(enum.Enum):
    DOT = "dot"
    SVG = "svg"


@dataclass(frozen=True)
class RenderOptions:
    view: View = View.STATIC
    format: Format = Format.DOT
    implicit_notation: bool = False
    event_filter: Optional[FrozenSet[str]] = None


def selected_events(doc: Document, opts: RenderOptions) -> List[Event]:
    """Events drawn by the dynamic view, in declaration order"""
    if not doc.events:
        raise ViewError(f"dynamic view needs at least one event; model '{doc.name}' declares none")
    if opts.event_filter is None:
        return list(doc.events)
    unknown = sorted(set(opts.event_filter) - set(doc.event_ids()))
    if unknown:
        raise ViewError(f"event filter names undeclared event(s): {', '.join(unknown)}")
    return [e for e in doc.events if e.id in opts.event_filter]


def check_view(doc: Document, opts: RenderOptions) -> None:
    if opts.view is View.DYNAMIC:
        selected_events(doc, opts)
    elif opts.view is View.CHRONOLOGY and doc.chronology is None:
        raise ViewError(f"chronology view needs a chronology; model '{doc.name}' declares none")
    elif opts.event_filter is not None and opts.view is not View.DYNAMIC:
        raise ViewError("an event filter applies to the dynamic view only")


def is_implicit(node, opts: RenderOptions) -> bool:
    """Create/process nodes drawn without a label"""
    if not isinstance(node, ActionNode) or node.kind not in (ActionKind.CREATE, ActionKind.PROCESS):
        return False
    return node.implicit or opts.implicit_notation


def node_label(node) -> str:
    """`kind` for an action named after its kind, `name: kind` otherwise, then `@N`"""
    if isinstance(node, ActionNode):
        text = node.kind.value if node.name == node.kind.value else f"{node.name}: {node.kind.value}"
    else:
        text = node.name
    return text + (f" @{node.label}" if node.label is not None else "")


def thimac_label(thimac: Thimac) -> str:
    return thimac.name + (f" @{thimac.label}" if thimac.label is not None else "")


def event_label(event: Event) -> str:
    text = f"{event.id}: {event.description}"
    return text + (f" [time: {event.time}]" if event.time is not None else "")


def rank_layers(nodes: Sequence[str], edges: Iterable[Tuple[str, str]]) -> List[List[str]]:
    """Group `nodes` into ranks by longest path and order each rank by barycenter"""
    if not nodes:
        return []
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from((u, v) for u, v in edges if u in graph and v in graph and u != v)
    dag = nx.condensation(graph)
    members = dag.graph["mapping"]
    depth: Dict[int, int] = {}
    for component in nx.topological_sort(dag):
        depth[component] = max((depth[p] + 1 for p in dag.predecessors(component)), default=0)

    index = {n: i for i, n in enumerate(nodes)}
    layers: List[List[str]] = [[] for _ in range(max(depth.values()) + 1)]
    for node in nodes:
        layers[depth[members[node]]].append(node)

    position = {n: i for i, n in enumerate(layers[0])}
    for layer in layers[1:]:
        def barycenter(node: str) -> Tuple[float, int]:
            placed = [position[p] for p in graph.predecessors(node) if p in position]
            return (sum(placed) / len(placed) if placed else float(index[node]), index[node])
        layer.sort(key=barycenter)
        position.update({n: i for i, n in enumerate(layer)})
    return layers


# Static layout

CHAR_W = 7
NODE_W = 96
NODE_H = 32
STORE_H = 44
GAP_X = 48
GAP_Y = 18
PAD = 14
TITLE_H = 22
MARGIN = 20


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def cx(self) -> float:
        return self.x + self.w / 2

    @property
    def cy(self) -> float:
        return self.y + self.h / 2

    def union(self, other: "Box") -> "Box":
        x, y = min(self.x, other.x), min(self.y, other.y)
        return Box(x, y, max(self.x + self.w, other.x + other.w) - x, max(self.y + self.h, other.y + other.h) - y)

    def grow(self, by: float) -> "Box":
        return Box(self.x - by, self.y - by, self.w + 2 * by, self.h + 2 * by)


@dataclass
class StaticLayout:
    boxes: Dict[str, Box] = field(default_factory=dict)
    width: float = 2 * MARGIN
    height: float = 2 * MARGIN


def node_size(node, opts: RenderOptions) -> Tuple[float, float]:
    if is_implicit(node, opts):
        return 16.0, 16.0
    width = max(NODE_W, CHAR_W * len(node_label(node)) + 16)
    return float(width), float(STORE_H if isinstance(node, StorageNode) else NODE_H)


class StaticLayouter:
    """
    Computes nested boxes for every thimac, action and storage of a document
    """
    def __init__(self, doc: Document, opts: RenderOptions):
        self.doc = doc
        self.opts = opts
        self._sizes: Dict[str, Tuple[float, float]] = {}
        self._local_flows: Dict[str, List[Tuple[str, str]]] = {}
        for flow in doc.flows:
            owner = doc.owner_of(flow.src)
            if owner and owner == doc.owner_of(flow.dst):
                self._local_flows.setdefault(owner, []).append((flow.src, flow.dst))

    def _split(self, thimac: Thimac) -> Tuple[List[str], List[str]]:
        nodes = [c for c in thimac.children if not isinstance(self.doc.elements[c], Thimac)]
        nested = [c for c in thimac.children if isinstance(self.doc.elements[c], Thimac)]
        return nodes, nested

    def _columns(self, thimac: Thimac) -> List[List[str]]:
        nodes, _ = self._split(thimac)
        return rank_layers(nodes, self._local_flows.get(thimac.id, []))

    def measure(self, thimac_id: str) -> Tuple[float, float]:
        if thimac_id in self._sizes:
            return self._sizes[thimac_id]
        thimac = self.doc.elements[thimac_id]
        _, nested = self._split(thimac)
        grid_w, grid_h = 0.0, 0.0
        for column in self._columns(thimac):
            sizes = [node_size(self.doc.elements[n], self.opts) for n in column]
            grid_w += max(w for w, _ in sizes) + (GAP_X if grid_w else 0)
            grid_h = max(grid_h, sum(h for _, h in sizes) + GAP_Y * (len(sizes) - 1))
        row_w, row_h = 0.0, 0.0
        for child in nested:
            w, h = self.measure(child)
            row_w += w + (GAP_X if row_w else 0)
            row_h = max(row_h, h)
        inner_w = max(grid_w, row_w, CHAR_W * len(thimac_label(thimac)))
        inner_h = grid_h + row_h + (GAP_Y if grid_h and row_h else 0)
        size = (inner_w + 2 * PAD, inner_h + TITLE_H + 2 * PAD)
        self._sizes[thimac_id] = size
        return size

    def place(self, thimac_id: str, x: float, y: float, boxes: Dict[str, Box]) -> None:
        thimac = self.doc.elements[thimac_id]
        w, h = self.measure(thimac_id)
        boxes[thimac_id] = Box(x, y, w, h)
        _, nested = self._split(thimac)
        cursor_x, top = x + PAD, y + PAD + TITLE_H
        grid_h = 0.0
        for column in self._columns(thimac):
            sizes = [node_size(self.doc.elements[n], self.opts) for n in column]
            col_w = max(w for w, _ in sizes)
            cursor_y = top
            for node_id, (nw, nh) in zip(column, sizes):
                boxes[node_id] = Box(cursor_x + (col_w - nw) / 2, cursor_y, nw, nh)
                cursor_y += nh + GAP_Y
            grid_h = max(grid_h, cursor_y - GAP_Y - top)
            cursor_x += col_w + GAP_X
        cursor_x = x + PAD
        row_top = top + (grid_h + GAP_Y if grid_h else 0)
        for child in nested:
            self.place(child, cursor_x, row_top, boxes)
            cursor_x += self.measure(child)[0] + GAP_X

    def layout(self) -> StaticLayout:
        result = StaticLayout()
        x = MARGIN
        for root in self.doc.roots:
            w, h = self.measure(root)
            self.place(root, x, MARGIN, result.boxes)
            x += w + GAP_X
            result.height = max(result.height, h + 2 * MARGIN)
        if self.doc.roots:
            result.width = x - GAP_X + MARGIN
        logger.debug(f"Laid out {len(result.boxes)} box(es) in {result.width}x{result.height}")
        return result


def layout_static(doc: Document, opts: RenderOptions) -> StaticLayout:
    return StaticLayouter(doc, opts).layout()


# Chronology graph

@dataclass(frozen=True)
class ChronNode:
    id: str
    kind: str  # start, end, event, alt, par
    label: str = ""


@dataclass(frozen=True)
class ChronEdge:
    src: str
    dst: str
    label: str = ""
    back: bool = False


@dataclass
class ChronologyGraph:
    nodes: List[ChronNode] = field(default_factory=list)
    edges: List[ChronEdge] = field(default_factory=list)


class _ChronologyBuilder:
    def __init__(self):
        self.graph = ChronologyGraph()

    def add_node(self, kind: str, label: str = "") -> str:
        node_id = f"c{len(self.graph.nodes)}"
        self.graph.nodes.append(ChronNode(node_id, kind, label))
        return node_id

    def add_edge(self, src: str, dst: str, label: str = "", back: bool = False) -> None:
        self.graph.edges.append(ChronEdge(src, dst, label, back))

    def build(self, expr: BehaviorExpr) -> Tuple[str, str]:
        """Add the subgraph of `expr`; returns its (entry, exit) node ids"""
        if isinstance(expr, EventRef):
            node_id = self.add_node("event", expr.event)
            return node_id, node_id
        if isinstance(expr, Seq):
            entry, exit_ = self.build(expr.items[0])
            for item in expr.items[1:]:
                first, last = self.build(item)
                self.add_edge(exit_, first)
                exit_ = last
            return entry, exit_
        if isinstance(expr, (Alt, Par)):
            kind = "alt" if isinstance(expr, Alt) else "par"
            split = self.add_node(kind)
            parts = [self.build(branch) for branch in expr.branches]
            join = self.add_node(kind)
            for first, last in parts:
                self.add_edge(split, first)
                self.add_edge(last, join)
            return split, join
        if isinstance(expr, Loop):
            first, last = self.build(expr.body)
            self.add_edge(last, first, expr.guard if expr.guard is not None else "repeat", back=True)
            return first, last
        raise TypeError(f"not a behavior expression: {expr!r}")


def chronology_graph(expr: BehaviorExpr) -> ChronologyGraph:
    """Start node, the behavior graph, end node"""
    builder = _ChronologyBuilder()
    start = builder.add_node("start")
    first, last = builder.build(expr)
    end = builder.add_node("end")
    builder.add_edge(start, first)
    builder.add_edge(last, end)
    return builder.graph
