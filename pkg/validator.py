#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
validator.py - Semantic checks for Thinging Machine documents

Static rules cover the flow grammar over the five actions, boundary
crossing, trigger targets and the node kinds allowed in each mode. Dynamic
rules cover event carving, chronology references and annotations.

Rule catalog
------------
    V1   Error    flow/trigger endpoint does not resolve
    V2   Error    endpoint of the wrong element kind, or flow self-loop
    V3   Error    flow adjacency not allowed in the active mode
    V4   Error    boundary crossing other than transfer -> transfer
    V5   Error    trigger target is not create/process
    V6   Error    release/transfer/receive node in Simplified mode
    V7   Error    event reference does not resolve
    V8   Error    chronology names an undeclared event
    V9   Warning  event region not weakly connected
    V10  Warning  two events carve identical regions
    V11  Error    annotation names an undeclared event

Strict adjacency (flows between nodes of one thimac):

    create   -> process, release, store
    receive  -> process, release, store
    process  -> release, store
    release  -> transfer
    transfer -> transfer, receive
    store    -> process, release

Create may not flow straight to transfer; the release hop is required.
Triggers may cross thimac boundaries.
"""

import enum
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional

import networkx as nx

from core import Diagnostic, Severity, SourceSpan, UnknownRefError, has_errors, sort_diagnostics
from model import ActionNode, Document, Region, behavior_leaves, region_of

logger = logging.getLogger(__name__)


class Mode(enum.Enum):
    STRICT = "strict"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True)
class ValidationRule:
    code: str
    severity: Severity
    description: str


RULES: Dict[str, ValidationRule] = {rule.code: rule for rule in (
    ValidationRule("V1", Severity.ERROR, "flow/trigger endpoint does not resolve"),
    ValidationRule("V2", Severity.ERROR, "endpoint of the wrong element kind, or flow self-loop"),
    ValidationRule("V3", Severity.ERROR, "flow adjacency not allowed in the active mode"),
    ValidationRule("V4", Severity.ERROR, "boundary crossing other than transfer -> transfer"),
    ValidationRule("V5", Severity.ERROR, "trigger target is not create/process"),
    ValidationRule("V6", Severity.ERROR, "release/transfer/receive node in Simplified mode"),
    ValidationRule("V7", Severity.ERROR, "event reference does not resolve"),
    ValidationRule("V8", Severity.ERROR, "chronology names an undeclared event"),
    ValidationRule("V9", Severity.WARNING, "event region not weakly connected"),
    ValidationRule("V10", Severity.WARNING, "two events carve identical regions"),
    ValidationRule("V11", Severity.ERROR, "annotation names an undeclared event"),
)}

STRICT_ADJACENCY: Dict[str, FrozenSet[str]] = {
    "create": frozenset({"process", "release", "store"}),
    "receive": frozenset({"process", "release", "store"}),
    "process": frozenset({"release", "store"}),
    "release": frozenset({"transfer"}),
    "transfer": frozenset({"transfer", "receive"}),
    "store": frozenset({"process", "release"}),
}

TRIGGER_TARGETS = frozenset({"create", "process"})


def flow_allowed(src_kind: str, dst_kind: str, mode: Mode = Mode.STRICT) -> bool:
    """Whether a flow between two nodes of the same thimac is allowed"""
    if mode is Mode.SIMPLIFIED:
        return src_kind in ("create", "process", "store") and dst_kind in ("create", "process", "store")
    return dst_kind in STRICT_ADJACENCY.get(src_kind, frozenset())


def _report(out: List[Diagnostic], code: str, message: str, span: Optional[SourceSpan]) -> None:
    out.append(Diagnostic(RULES[code].severity, code, message, span))


def check_static(doc: Document, mode: Mode = Mode.STRICT) -> List[Diagnostic]:
    """All static rule violations of `doc` in `mode`, ordered by span"""
    out: List[Diagnostic] = []

    for flow in doc.flows:
        missing = [ref for ref in (flow.src, flow.dst) if ref not in doc.elements]
        for ref in missing:
            _report(out, "V1", f"flow endpoint '{ref}' does not resolve", flow.span)
        if missing:
            continue
        src_kind, dst_kind = doc.kind_of(flow.src), doc.kind_of(flow.dst)
        if "thimac" in (src_kind, dst_kind):
            _report(out, "V2", f"flow {flow.src} -> {flow.dst} must connect actions or stores", flow.span)
            continue
        if flow.src == flow.dst:
            _report(out, "V2", f"flow {flow.src} -> {flow.dst} is a self-loop", flow.span)
            continue
        if mode is Mode.SIMPLIFIED:
            # elidable endpoints are reported once per node under V6
            continue
        if doc.owner_of(flow.src) != doc.owner_of(flow.dst):
            if (src_kind, dst_kind) != ("transfer", "transfer"):
                _report(out, "V4",
                        f"flow {flow.src} ({src_kind}) -> {flow.dst} ({dst_kind}) crosses a thimac boundary;"
                        f" only transfer -> transfer may cross", flow.span)
        elif not flow_allowed(src_kind, dst_kind, mode):
            _report(out, "V3", f"flow {src_kind} -> {dst_kind} is not allowed ({flow.src} -> {flow.dst})", flow.span)

    for trigger in doc.triggers:
        missing = [ref for ref in (trigger.src, trigger.dst) if ref not in doc.elements]
        for ref in missing:
            _report(out, "V1", f"trigger endpoint '{ref}' does not resolve", trigger.span)
        if missing:
            continue
        wrong = [ref for ref in (trigger.src, trigger.dst) if not isinstance(doc.get(ref), ActionNode)]
        for ref in wrong:
            _report(out, "V2", f"trigger endpoint '{ref}' is a {doc.kind_of(ref)}, not an action", trigger.span)
        if wrong:
            continue
        target_kind = doc.kind_of(trigger.dst)
        if target_kind not in TRIGGER_TARGETS:
            _report(out, "V5", f"trigger target '{trigger.dst}' is a {target_kind}; expected create or process",
                    trigger.span)

    if mode is Mode.SIMPLIFIED:
        for action in doc.actions():
            if action.kind.elidable:
                _report(out, "V6", f"{action.kind.value} node '{action.id}' is not allowed in simplified mode",
                        action.span)

    logger.debug(f"Static check ({mode.value}) of '{doc.name}': {len(out)} diagnostic(s)")
    return sort_diagnostics(out)


def region_graph(doc: Document, region: Region) -> nx.Graph:
    """Undirected graph over a region: containment links plus edge endpoints"""
    graph = nx.Graph()
    graph.add_nodes_from(region.elements)
    for element_id in region.elements:
        element = doc.get(element_id)
        if element is not None and element.owner in region:
            graph.add_edge(element_id, element.owner)
            continue
        edge = doc.edge(element_id) if element is None else None
        if edge is not None:
            graph.add_edge(element_id, edge.src)
            graph.add_edge(element_id, edge.dst)
    return graph


def check_dynamic(doc: Document) -> List[Diagnostic]:
    """Event, chronology and annotation rule violations, ordered by span"""
    out: List[Diagnostic] = []
    regions: Dict[str, Region] = {}

    for event in doc.events:
        unresolved = [ref for ref in event.covers if ref not in doc.elements and doc.edge(ref) is None]
        for ref in unresolved:
            _report(out, "V7", f"event {event.id} covers unknown reference '{ref}'", event.span)
        if unresolved:
            continue
        try:
            regions[event.id] = region_of(doc, event.covers)
        except UnknownRefError as e:
            _report(out, "V7", f"event {event.id}: {e}", event.span)

    seen: Dict[FrozenSet[str], str] = {}
    for event in doc.events:
        region = regions.get(event.id)
        if region is None:
            continue
        if len(region) and not nx.is_connected(region_graph(doc, region)):
            _report(out, "V9", f"event {event.id} region is not weakly connected", event.span)
        if region.elements in seen:
            _report(out, "V10", f"event {event.id} carves the same region as {seen[region.elements]}", event.span)
        else:
            seen[region.elements] = event.id

    declared = set(doc.event_ids())
    if doc.chronology is not None:
        for leaf in behavior_leaves(doc.chronology):
            if leaf.event not in declared:
                _report(out, "V8", f"chronology names undeclared event '{leaf.event}'", leaf.span)

    for annotation in doc.annotations:
        if annotation.event not in declared:
            _report(out, "V11", f"annotation names undeclared event '{annotation.event}'", annotation.span)

    logger.debug(f"Dynamic check of '{doc.name}': {len(out)} diagnostic(s)")
    return sort_diagnostics(out)


def validate(doc: Document, mode: Mode = Mode.STRICT) -> List[Diagnostic]:
    """Static check, then the dynamic check when the static model is error free"""
    diagnostics = check_static(doc, mode)
    if has_errors(diagnostics):
        return diagnostics
    return sort_diagnostics(diagnostics + check_dynamic(doc))
