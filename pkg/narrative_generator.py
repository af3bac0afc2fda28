#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
narrative_generator.py - Text generation from documents for tmc

This module provides the chronology narrative, the static walkthrough and
the domain-text coverage report, each with an ArtifactGenerator wrapper.

Narrative templates:

    EventRef   description (terminal period ensured) + " (<id>)"
    Seq        parts joined by a single space
    Alt        "Either: " + b1 + " Or: " + b2 ...
    Loop       body + " This repeats."  /  body + " Repeating this <guard>."
    Par        "In parallel: " + branches joined by " And: "
"""

import logging
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from typing import List, Sequence, Tuple, Union

from core import (
    ArtifactGenerator, Diagnostic, NoChronologyError, Severity, TmArtifact, UnknownEventError,
)
from model import (
    ActionNode, Alt, Annotation, BehaviorExpr, Document, EventRef, FlowEdge, Loop, Par, Seq, StorageNode,
    Thimac, iter_containment,
)

logger = logging.getLogger(__name__)

OPEN_MARK = "<<"
CLOSE_MARK = ">>"


def _sentence(text: str) -> str:
    return text if text.endswith(".") else text + "."


def narrate_behavior(doc: Document, expr: BehaviorExpr) -> str:
    if isinstance(expr, EventRef):
        event = doc.event(expr.event)
        if event is None:
            raise UnknownEventError(expr.event)
        return f"{_sentence(event.description)} ({event.id})"
    if isinstance(expr, Seq):
        return " ".join(narrate_behavior(doc, item) for item in expr.items)
    if isinstance(expr, Alt):
        return "Either: " + " Or: ".join(narrate_behavior(doc, b) for b in expr.branches)
    if isinstance(expr, Loop):
        body = narrate_behavior(doc, expr.body)
        if expr.guard is None:
            return body + " This repeats."
        return f"{body} Repeating this {expr.guard}."
    if isinstance(expr, Par):
        return "In parallel: " + " And: ".join(narrate_behavior(doc, b) for b in expr.branches)
    raise TypeError(f"not a behavior expression: {expr!r}")


def narrate_chronology(doc: Document) -> str:
    """Narrative text of the document's chronology"""
    if doc.chronology is None:
        raise NoChronologyError(doc.name)
    return narrate_behavior(doc, doc.chronology)


def _describe_node(element) -> str:
    label = f" (@{element.label})" if element.label is not None else ""
    if isinstance(element, ActionNode):
        return f"{element.kind.value} {element.name}{label}"
    return f"store {element.name}{label}"


def describe_static(doc: Document) -> str:
    """Walkthrough of the static model: one line per thimac, then one per edge"""
    lines = []
    for depth, element in iter_containment(doc):
        if not isinstance(element, Thimac):
            continue
        head = "  " * depth + f"- {element.id}"
        if element.label is not None:
            head += f" (@{element.label})"
        nodes = [_describe_node(doc.elements[c]) for c in element.children
                 if isinstance(doc.elements[c], (ActionNode, StorageNode))]
        lines.append(head + (": " + ", ".join(nodes) if nodes else ""))
    for edge in sorted(doc.edges(), key=lambda e: (e.decl, e.id)):
        arrow = "->" if isinstance(edge, FlowEdge) else "-->"
        lines.append(f"  {edge.src} {arrow} {edge.dst}")
    return "\n".join(lines) + "\n" if lines else ""


# Coverage

@dataclass(frozen=True)
class CoverageReport:
    total_bytes: int
    covered_bytes: int
    percent: Decimal
    marked_text: str

    def format(self) -> str:
        """`coverage: P%`, `covered: X/Y bytes`, a blank line, then the marked text"""
        return f"coverage: {self.percent}%\ncovered: {self.covered_bytes}/{self.total_bytes} bytes\n\n{self.marked_text}"


AnnotationLike = Union[Annotation, Tuple[str, Sequence[Tuple[int, int]]]]


def merge_spans(spans: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Sort and merge spans; touching spans merge, empty spans vanish"""
    merged: List[Tuple[int, int]] = []
    for start, end in sorted(s for s in spans if s[0] < s[1]):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def coverage_percent(covered: int, total: int) -> Decimal:
    if total == 0:
        return Decimal("0.0")
    return (Decimal(covered * 100) / Decimal(total)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def coverage_report(source_text: str, annotations: Sequence[AnnotationLike]) -> Tuple[CoverageReport, List[Diagnostic]]:
    """
    Coverage of `source_text` by the byte spans of `annotations`.

    Spans outside the text are clipped and reversed spans are ignored; both
    produce a C1 warning.
    """
    data = source_text.encode("utf-8")
    total = len(data)
    diagnostics: List[Diagnostic] = []
    spans: List[Tuple[int, int]] = []
    for annotation in annotations:
        if isinstance(annotation, Annotation):
            event, event_spans, where = annotation.event, annotation.spans, annotation.span
        else:
            (event, event_spans), where = annotation, None
        for start, end in event_spans:
            if start > end:
                diagnostics.append(Diagnostic(Severity.WARNING, "C1",
                                              f"span {start}..{end} of {event} is reversed; ignored", where))
                continue
            clipped = (min(max(start, 0), total), min(max(end, 0), total))
            if clipped != (start, end):
                diagnostics.append(Diagnostic(Severity.WARNING, "C1",
                                              f"span {start}..{end} of {event} exceeds the text ({total} bytes);"
                                              f" clipped to {clipped[0]}..{clipped[1]}", where))
            spans.append(clipped)

    merged = merge_spans(spans)
    covered = sum(end - start for start, end in merged)
    pieces, cursor = [], 0
    for start, end in merged:
        pieces += [data[cursor:start], OPEN_MARK.encode(), data[start:end], CLOSE_MARK.encode()]
        cursor = end
    pieces.append(data[cursor:])
    marked = b"".join(pieces).decode("utf-8", errors="replace")
    report = CoverageReport(total, covered, coverage_percent(covered, total), marked)
    logger.debug(f"Coverage {report.percent}% from {len(merged)} merged span(s)")
    return report, diagnostics


class NarrativeGenerator(ArtifactGenerator):
    """
    Generates the chronology narrative
    """
    artifact_type = "NARRATIVE"

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        self._emit(doc.name, narrate_chronology(doc))
        return self.artifacts


class StaticNarrativeGenerator(ArtifactGenerator):
    """
    Generates the static walkthrough
    """
    artifact_type = "NARRATIVE"

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        self._emit(doc.name, describe_static(doc))
        return self.artifacts


class CoverageGenerator(ArtifactGenerator):
    """
    Generates the coverage report of a domain text; warnings land in self.diagnostics
    """
    artifact_type = "COVERAGE"

    def __init__(self):
        super().__init__()
        self.diagnostics: List[Diagnostic] = []

    def generate(self, doc: Document, **kwargs) -> List[TmArtifact]:
        source_text = kwargs.get("source_text", "")
        report, diagnostics = coverage_report(source_text, doc.annotations)
        self.diagnostics.extend(diagnostics)
        self._emit(doc.source or doc.name, report.format())
        return self.artifacts
