#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
svg_generator.py - Self-contained SVG output for tmc

This module provides to_svg and the SvgGenerator class. Only rect, ellipse,
path, text and g elements are emitted, so the output needs no external
layout engine or stylesheet. Thimacs are nested rectangles, storages are
cylinder glyphs (a rect and two ellipses), triggers are dashed, and each
event of the dynamic view is a dotted boundary around its region.
"""

import html
import logging
import math
from typing import List, Optional, Tuple

from core import ArtifactGenerator, TmArtifact
from layout import (
    Box, RenderOptions, View, check_view, chronology_graph, event_label, is_implicit,
    layout_static, node_label, rank_layers, selected_events, thimac_label,
    CHAR_W, GAP_X, GAP_Y, MARGIN, NODE_H,
)
from model import ActionNode, Document, FlowEdge, StorageNode, Thimac, event_region

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
FONT = 'font-family="Helvetica, Arial, sans-serif" font-size="11"'
ARROW = 8


def num(value: float) -> str:
    """Shortest fixed-point form with at most one decimal"""
    text = f"{value:.1f}"
    return text[:-2] if text.endswith(".0") else text


def esc(text: str) -> str:
    return html.escape(text, quote=True)


def clip_to_box(box: Box, toward_x: float, toward_y: float) -> Tuple[float, float]:
    """Point where the ray from the box center toward (x, y) leaves the box"""
    dx, dy = toward_x - box.cx, toward_y - box.cy
    if dx == 0 and dy == 0:
        return box.cx, box.cy
    scale = min(box.w / 2 / abs(dx) if dx else math.inf, box.h / 2 / abs(dy) if dy else math.inf)
    return box.cx + dx * scale, box.cy + dy * scale


class SvgWriter:
    """
    Accumulates SVG elements with indentation
    """
    def __init__(self):
        self.lines: List[str] = []
        self.depth = 1

    def element(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def open(self, tag: str) -> None:
        self.element(tag)
        self.depth += 1

    def close(self, name: str = "g") -> None:
        self.depth -= 1
        self.element(f"</{name}>")

    def text(self, x: float, y: float, content: str, anchor: str = "middle") -> None:
        self.element(f'<text x="{num(x)}" y="{num(y)}" text-anchor="{anchor}" {FONT}>{esc(content)}</text>')

    def arrow(self, x1: float, y1: float, x2: float, y2: float, css: str, dashed: bool = False) -> None:
        length = math.hypot(x2 - x1, y2 - y1) or 1.0
        ux, uy = (x2 - x1) / length, (y2 - y1) / length
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.element(f'<path class="{css}" d="M {num(x1)} {num(y1)} L {num(x2)} {num(y2)}" '
                     f'fill="none" stroke="black"{dash}/>')
        bx, by = x2 - ux * ARROW, y2 - uy * ARROW
        px, py = -uy * ARROW / 2, ux * ARROW / 2
        self.element(f'<path class="arrowhead" d="M {num(x2)} {num(y2)} L {num(bx + px)} {num(by + py)} '
                     f'L {num(bx - px)} {num(by - py)} Z" fill="black"/>')


class SvgRenderer:
    """
    Renders one view of a document as an SVG document
    """
    def __init__(self, doc: Document, opts: RenderOptions):
        self.doc = doc
        self.opts = opts
        self.out = SvgWriter()
        self.width, self.height = float(2 * MARGIN), float(2 * MARGIN)

    def render(self) -> str:
        check_view(self.doc, self.opts)
        if self.opts.view is View.CHRONOLOGY:
            self._chronology()
        else:
            self._static()
        header = (f'<svg xmlns="{SVG_NS}" version="1.1" width="{num(self.width)}" height="{num(self.height)}" '
                  f'viewBox="0 0 {num(self.width)} {num(self.height)}">')
        return "\n".join([header] + self.out.lines + ["</svg>"]) + "\n"

    # Static and dynamic views

    def _static(self) -> None:
        layout = layout_static(self.doc, self.opts)
        boxes = layout.boxes
        self.width, self.height = layout.width, layout.height
        for root in self.doc.roots:
            self._thimac(self.doc.elements[root], boxes)
        for edge in self.doc.edges():
            if edge.src not in boxes or edge.dst not in boxes:
                continue
            src, dst = boxes[edge.src], boxes[edge.dst]
            x1, y1 = clip_to_box(src, dst.cx, dst.cy)
            x2, y2 = clip_to_box(dst, src.cx, src.cy)
            if isinstance(edge, FlowEdge):
                self.out.arrow(x1, y1, x2, y2, "flow")
            else:
                self.out.arrow(x1, y1, x2, y2, "trigger", dashed=True)
        if self.opts.view is View.DYNAMIC:
            self._events(boxes)

    def _thimac(self, thimac: Thimac, boxes) -> None:
        box = boxes[thimac.id]
        self.out.open(f'<g class="thimac" id="{esc(thimac.id)}">')
        self.out.element(f'<rect x="{num(box.x)}" y="{num(box.y)}" width="{num(box.w)}" height="{num(box.h)}" '
                         f'rx="6" fill="none" stroke="black"/>')
        self.out.text(box.x + 8, box.y + 15, thimac_label(thimac), anchor="start")
        for child_id in thimac.children:
            child = self.doc.elements[child_id]
            if isinstance(child, Thimac):
                self._thimac(child, boxes)
            elif isinstance(child, StorageNode):
                self._cylinder(child, boxes[child_id])
            else:
                self._action(child, boxes[child_id])
        self.out.close()

    def _action(self, action: ActionNode, box: Box) -> None:
        if is_implicit(action, self.opts):
            self.out.open(f'<g class="action implicit" id="{esc(action.id)}">')
            self.out.element(f'<ellipse cx="{num(box.cx)}" cy="{num(box.cy)}" rx="6" ry="6" fill="black"/>')
        else:
            self.out.open(f'<g class="action {action.kind.value}" id="{esc(action.id)}">')
            self.out.element(f'<rect x="{num(box.x)}" y="{num(box.y)}" width="{num(box.w)}" '
                             f'height="{num(box.h)}" fill="white" stroke="black"/>')
            self.out.text(box.cx, box.cy + 4, node_label(action))
        self.out.close()

    def _cylinder(self, store: StorageNode, box: Box) -> None:
        ry = 6.0
        self.out.open(f'<g class="cylinder" id="{esc(store.id)}">')
        self.out.element(f'<rect x="{num(box.x)}" y="{num(box.y + ry)}" width="{num(box.w)}" '
                         f'height="{num(box.h - 2 * ry)}" fill="white" stroke="black"/>')
        self.out.element(f'<ellipse cx="{num(box.cx)}" cy="{num(box.y + ry)}" rx="{num(box.w / 2)}" '
                         f'ry="{num(ry)}" fill="white" stroke="black"/>')
        self.out.element(f'<ellipse cx="{num(box.cx)}" cy="{num(box.y + box.h - ry)}" rx="{num(box.w / 2)}" '
                         f'ry="{num(ry)}" fill="none" stroke="black"/>')
        self.out.text(box.cx, box.cy + 4, node_label(store))
        self.out.close()

    def _events(self, boxes) -> None:
        for index, event in enumerate(selected_events(self.doc, self.opts)):
            region = event_region(self.doc, event)
            members = [boxes[e] for e in region
                       if e in boxes and not isinstance(self.doc.elements.get(e), Thimac)]
            if not members:
                members = [boxes[e] for e in region if e in boxes]
            bound = members[0]
            for other in members[1:]:
                bound = bound.union(other)
            bound = bound.grow(6 + 3 * (index % 4))
            self.out.open(f'<g class="event" id="event-{esc(event.id)}">')
            self.out.element(f'<rect x="{num(bound.x)}" y="{num(bound.y)}" width="{num(bound.w)}" '
                             f'height="{num(bound.h)}" fill="none" stroke="black" stroke-dasharray="2,3"/>')
            self.out.text(bound.x + 2, bound.y - 3, event_label(event), anchor="start")
            self.out.close()

    # Chronology view

    def _chronology(self) -> None:
        graph = chronology_graph(self.doc.chronology)
        forward = [(e.src, e.dst) for e in graph.edges if not e.back]
        layers = rank_layers([n.id for n in graph.nodes], forward)
        nodes = {n.id: n for n in graph.nodes}

        boxes = {}
        x = float(MARGIN)
        tallest = 0.0
        for layer in layers:
            sizes = [self._chron_size(nodes[n]) for n in layer]
            col_w = max(w for w, _ in sizes)
            y = float(MARGIN + 2 * GAP_Y)
            for node_id, (w, h) in zip(layer, sizes):
                boxes[node_id] = Box(x + (col_w - w) / 2, y, w, h)
                y += NODE_H + GAP_Y
            tallest = max(tallest, y)
            x += col_w + GAP_X
        self.width = x - GAP_X + MARGIN if layers else self.width
        self.height = tallest + MARGIN

        for node in graph.nodes:
            box = boxes[node.id]
            self.out.open(f'<g class="chronology-{node.kind}" id="{node.id}">')
            if node.kind == "event":
                self.out.element(f'<rect x="{num(box.x)}" y="{num(box.y)}" width="{num(box.w)}" '
                                 f'height="{num(box.h)}" rx="8" fill="white" stroke="black"/>')
                self.out.text(box.cx, box.cy + 4, node.label)
            elif node.kind == "alt":
                self.out.element(f'<path d="M {num(box.cx)} {num(box.y)} L {num(box.x + box.w)} {num(box.cy)} '
                                 f'L {num(box.cx)} {num(box.y + box.h)} L {num(box.x)} {num(box.cy)} Z" '
                                 f'fill="white" stroke="black"/>')
            elif node.kind == "par":
                self.out.element(f'<rect x="{num(box.x)}" y="{num(box.y)}" width="{num(box.w)}" '
                                 f'height="{num(box.h)}" fill="black"/>')
            else:
                fill = "black" if node.kind == "start" else "none"
                self.out.element(f'<ellipse cx="{num(box.cx)}" cy="{num(box.cy)}" rx="8" ry="8" '
                                 f'fill="{fill}" stroke="black"/>')
            self.out.close()

        for edge in graph.edges:
            src, dst = boxes[edge.src], boxes[edge.dst]
            if edge.back:
                self._back_edge(src, dst, edge.label)
                continue
            x1, y1 = clip_to_box(src, dst.cx, dst.cy)
            x2, y2 = clip_to_box(dst, src.cx, src.cy)
            self.out.arrow(x1, y1, x2, y2, "sequence")

    @staticmethod
    def _chron_size(node) -> Tuple[float, float]:
        if node.kind == "event":
            return float(max(48, CHAR_W * len(node.label) + 16)), float(NODE_H)
        if node.kind == "par":
            return 6.0, float(NODE_H)
        if node.kind == "alt":
            return 24.0, 24.0
        return 16.0, 16.0

    def _back_edge(self, src: Box, dst: Box, label: str) -> None:
        top = min(src.y, dst.y) - GAP_Y - 4
        x1, x2 = src.cx, dst.cx
        self.out.open('<g class="loop">')
        self.out.element(f'<path d="M {num(x1)} {num(src.y)} C {num(x1)} {num(top)} {num(x2)} {num(top)} '
                         f'{num(x2)} {num(dst.y)}" fill="none" stroke="black"/>')
        self.out.text((x1 + x2) / 2, top - 2, label)
        self.out.close()


def to_svg(doc: Document, opts: Optional[RenderOptions] = None) -> str:
    """Render `doc` as SVG; raises ViewError for an unusable view"""
    return SvgRenderer(doc, opts or RenderOptions()).render()


class SvgGenerator(ArtifactGenerator):
    """
    Generates SVG diagrams
    """
    artifact_type = "SVG"

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        opts = kwargs.get("options") or RenderOptions()
        text = to_svg(doc, opts)
        logger.debug(f"Rendered {opts.view.value} view of '{doc.name}' as SVG")
        self._emit(f"{doc.name}.{opts.view.value}.svg", text)
        return self.artifacts
