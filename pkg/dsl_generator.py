#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
dsl_generator.py - Canonical .tm printer for tmc

This module provides print_canonical and the CanonicalGenerator wrapper.
Output uses 2-space indentation and keeps declaration order: inside every
thimac (and at model level) nested declarations and the flows/triggers
declared there are interleaved as they were in the source. Events, the
source path, annotations and the chronology follow the static part at
model level.
"""

import logging
from typing import Dict, List, Tuple

from core import ArtifactGenerator, TmArtifact
from model import (
    ActionNode, Alt, Annotation, BehaviorExpr, Document, Edge, Event, EventRef,
    FlowEdge, Loop, Par, Seq, StorageNode, Thimac,
)

logger = logging.getLogger(__name__)

INDENT = "  "


def quote(text: str) -> str:
    """Double-quote `text`, escaping backslash and quote"""
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label(label) -> str:
    return f" @{label}" if label is not None else ""


def _edge_line(edge: Edge) -> str:
    if isinstance(edge, FlowEdge):
        return f"flow {edge.src} -> {edge.dst}"
    return f"trigger {edge.src} --> {edge.dst}"


class CanonicalPrinter:
    """
    Walks a Document and produces its canonical text
    """
    def __init__(self, doc: Document):
        self.doc = doc
        self.lines: List[str] = []
        self._edges_by_scope: Dict[str, List[Edge]] = {}
        for edge in doc.edges():
            scope = edge.scope if isinstance(doc.get(edge.scope), Thimac) else ""
            self._edges_by_scope.setdefault(scope, []).append(edge)

    def print(self) -> str:
        doc = self.doc
        self.lines = [f"model {quote(doc.name)} {{"]
        self._block([doc.elements[r] for r in doc.roots], "", 1)
        if doc.source is not None:
            self._line(1, f"source {quote(doc.source)}")
        for event in doc.events:
            self._line(1, self._event_line(event))
        for annotation in doc.annotations:
            self._line(1, self._annotation_line(annotation))
        if doc.chronology is not None:
            self._line(1, "chronology {")
            self.lines.extend(behavior_lines(doc.chronology, 2))
            self._line(1, "}")
        self.lines.append("}")
        return "\n".join(self.lines) + "\n"

    def _line(self, depth: int, text: str) -> None:
        self.lines.append(INDENT * depth + text)

    def _block(self, elements, scope: str, depth: int) -> None:
        entries: List[Tuple[int, int, str, object]] = []
        for element in elements:
            entries.append((element.decl, 0, element.id, element))
        for edge in self._edges_by_scope.get(scope, ()):
            entries.append((edge.decl, 1, edge.id, edge))
        for _, _, _, item in sorted(entries, key=lambda e: e[:3]):
            if isinstance(item, Thimac):
                self._line(depth, f"thimac {item.name}{_label(item.label)} {{")
                self._block([self.doc.elements[c] for c in item.children], item.id, depth + 1)
                self._line(depth, "}")
            elif isinstance(item, ActionNode):
                self._line(depth, f"action {item.name}: {item.kind.value}{_label(item.label)}")
            elif isinstance(item, StorageNode):
                self._line(depth, f"store {item.name}{_label(item.label)}")
            else:
                self._line(depth, _edge_line(item))

    def _event_line(self, event: Event) -> str:
        refs: List[str] = []
        for ref in event.covers:
            edge = self.doc.edge(ref) if ref not in self.doc.elements else None
            # edge ids are written back as their endpoints; region_of yields the same region
            for item in ((edge.src, edge.dst) if edge is not None else (ref,)):
                if item not in refs:
                    refs.append(item)
        line = f"event {event.id} {quote(event.description)} covers {{ {', '.join(refs)} }}"
        if event.time is not None:
            line += f" time {quote(event.time)}"
        return line

    @staticmethod
    def _annotation_line(annotation: Annotation) -> str:
        spans = ", ".join(f"{start}..{end}" for start, end in annotation.spans)
        return f"annotate {annotation.event} spans {spans}"


def behavior_lines(expr: BehaviorExpr, depth: int) -> List[str]:
    """One term per line; `;` closes every term of a sequence except the last"""
    if isinstance(expr, Seq):
        lines: List[str] = []
        for i, item in enumerate(expr.items):
            term = behavior_lines(item, depth)
            if i < len(expr.items) - 1:
                term[-1] += ";"
            lines.extend(term)
        return lines
    pad = INDENT * depth
    if isinstance(expr, EventRef):
        return [pad + expr.event]
    if isinstance(expr, (Alt, Par)):
        lines = [pad + ("alt {" if isinstance(expr, Alt) else "par {")]
        for i, branch in enumerate(expr.branches):
            if i:
                lines.append(pad + "|")
            lines.extend(behavior_lines(branch, depth + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(expr, Loop):
        header = f"loop({quote(expr.guard)}) {{" if expr.guard is not None else "loop {"
        return [pad + header] + behavior_lines(expr.body, depth + 1) + [pad + "}"]
    raise TypeError(f"not a behavior expression: {expr!r}")


def print_canonical(doc: Document) -> str:
    """Render `doc` as canonical .tm text"""
    return CanonicalPrinter(doc).print()


class CanonicalGenerator(ArtifactGenerator):
    """
    Generates the canonical DSL text of a document
    """
    artifact_type = "DSL"

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        text = print_canonical(doc)
        logger.debug(f"Printed model '{doc.name}' ({len(text)} chars)")
        self._emit(doc.name, text)
        return self.artifacts
