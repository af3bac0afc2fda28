#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
dot_generator.py - Graphviz DOT output for tmc

This module provides to_dot and the DotGenerator class. Three views are
supported:

- static: one cluster per thimac, nested as in the model; actions labeled
  with their kind, storages drawn as cylinders, triggers dashed
- dynamic: one dotted cluster per event holding copies of the event's
  region (node ids prefixed with the event id)
- chronology: the behavior graph with diamond splits/joins for alternatives,
  bars for parallel branches and labeled back-edges for loops
"""

import logging
from typing import Callable, List, Optional

from core import ArtifactGenerator, TmArtifact
from layout import (
    RenderOptions, View, chronology_graph, check_view, event_label, is_implicit, node_label,
    selected_events, thimac_label,
)
from model import Document, FlowEdge, Region, StorageNode, Thimac, event_region

logger = logging.getLogger(__name__)


def dot_quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


class DotWriter:
    """
    Accumulates indented DOT statements
    """
    def __init__(self):
        self.lines: List[str] = []
        self.depth = 1

    def line(self, text: str) -> None:
        self.lines.append("  " * self.depth + text)

    def open(self, header: str) -> None:
        self.line(header + " {")
        self.depth += 1

    def close(self) -> None:
        self.depth -= 1
        self.line("}")


class DotRenderer:
    """
    Renders one view of a document as a DOT digraph
    """
    def __init__(self, doc: Document, opts: RenderOptions):
        self.doc = doc
        self.opts = opts
        self.out = DotWriter()

    def render(self) -> str:
        check_view(self.doc, self.opts)
        self.out.line("rankdir=LR;")
        self.out.line("node [fontname=\"Helvetica\", fontsize=10];")
        if self.opts.view is View.STATIC:
            self._static()
        elif self.opts.view is View.DYNAMIC:
            self._dynamic()
        else:
            self._chronology()
        body = "\n".join(self.out.lines)
        return f"digraph {dot_quote(self.doc.name)} {{\n" + (body + "\n" if body else "") + "}\n"

    # Static and dynamic views

    def _node(self, element, node_id: str) -> None:
        if is_implicit(element, self.opts):
            attrs = ["shape=point", 'label=""']
        else:
            shape = "shape=cylinder" if isinstance(element, StorageNode) else "shape=box"
            attrs = [shape, f"label={dot_quote(node_label(element))}"]
        self.out.line(f"{dot_quote(node_id)} [{', '.join(attrs)}];")

    def _cluster(self, thimac: Thimac, ident: Callable[[str], str], keep: Callable[[str], bool]) -> None:
        self.out.open(f"subgraph {dot_quote('cluster_' + ident(thimac.id))}")
        self.out.line(f"label={dot_quote(thimac_label(thimac))};")
        for child_id in thimac.children:
            if not keep(child_id):
                continue
            child = self.doc.elements[child_id]
            if isinstance(child, Thimac):
                self._cluster(child, ident, keep)
            else:
                self._node(child, ident(child_id))
        self.out.close()

    def _edges(self, ident: Callable[[str], str], keep: Callable[[str], bool]) -> None:
        for edge in self.doc.edges():
            if not keep(edge.src) or not keep(edge.dst):
                continue
            if edge.src not in self.doc.elements or edge.dst not in self.doc.elements:
                continue
            attrs = "" if isinstance(edge, FlowEdge) else " [style=dashed]"
            self.out.line(f"{dot_quote(ident(edge.src))} -> {dot_quote(ident(edge.dst))}{attrs};")

    def _static(self) -> None:
        for root in self.doc.roots:
            self._cluster(self.doc.elements[root], str, lambda _: True)
        self._edges(str, lambda _: True)

    def _dynamic(self) -> None:
        self.out.line("compound=true;")
        for event in selected_events(self.doc, self.opts):
            region: Region = event_region(self.doc, event)

            def ident(element_id: str, prefix: str = event.id) -> str:
                return f"{prefix}/{element_id}"

            self.out.open(f"subgraph {dot_quote('cluster_event_' + event.id)}")
            self.out.line(f"label={dot_quote(event_label(event))};")
            self.out.line("style=dotted;")
            for root in self.doc.roots:
                if root in region:
                    self._cluster(self.doc.elements[root], ident, region.__contains__)
            self.out.close()
            self._edges(ident, region.__contains__)

    # Chronology view

    def _chronology(self) -> None:
        graph = chronology_graph(self.doc.chronology)
        shapes = {
            "start": 'shape=circle, label="", width=0.2',
            "end": 'shape=doublecircle, label="", width=0.2',
            "alt": 'shape=diamond, label="", width=0.3, height=0.3',
            "par": 'shape=box, style=filled, label="", width=0.08, height=0.5',
        }
        for node in graph.nodes:
            if node.kind == "event":
                event = self.doc.event(node.label)
                tooltip = f", tooltip={dot_quote(event.description)}" if event is not None else ""
                attrs = f"shape=box, style=rounded, label={dot_quote(node.label)}{tooltip}"
            else:
                attrs = shapes[node.kind]
            self.out.line(f"{node.id} [{attrs}];")
        for edge in graph.edges:
            attrs = []
            if edge.label:
                attrs.append(f"label={dot_quote(edge.label)}")
            if edge.back:
                attrs += ["constraint=false", "style=bold"]
            suffix = f" [{', '.join(attrs)}]" if attrs else ""
            self.out.line(f"{edge.src} -> {edge.dst}{suffix};")


def to_dot(doc: Document, opts: Optional[RenderOptions] = None) -> str:
    """Render `doc` as a DOT digraph; raises ViewError for an unusable view"""
    return DotRenderer(doc, opts or RenderOptions()).render()


class DotGenerator(ArtifactGenerator):
    """
    Generates DOT diagrams
    """
    artifact_type = "DOT"

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        opts = kwargs.get("options") or RenderOptions()
        text = to_dot(doc, opts)
        logger.debug(f"Rendered {opts.view.value} view of '{doc.name}' as DOT")
        self._emit(f"{doc.name}.{opts.view.value}.dot", text)
        return self.artifacts
