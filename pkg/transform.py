#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
transform.py - Model-to-model reductions for Thinging Machine documents

Level 1 (simplify_level1) deletes release, transfer and receive nodes. Every
maximal path a -> r+ -> b through such nodes, where a and b are create,
process or store nodes, becomes one flow a -> b that records the deleted
nodes as its provenance. A node where a chain branches belongs to every
branch, so the shared prefix appears in the provenance of each replacement
flow.

Level 2 (mark_implicit) only sets a render hint on create and process nodes;
unmark_implicit clears it again.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from core import ChainCycleError, DanglingChainError, ModeError
from dsl_parser import edge_id
from model import ActionKind, ActionNode, Document, FlowEdge, Thimac, TriggerEdge

logger = logging.getLogger(__name__)

# replacement edge id -> elided node ids, in chain order
SimplificationMap = Dict[str, Tuple[str, ...]]


@dataclass(frozen=True)
class Chain:
    start: str
    nodes: Tuple[str, ...]
    end: str
    entry: FlowEdge


def _is_elidable(doc: Document, element_id: str) -> bool:
    element = doc.get(element_id)
    return isinstance(element, ActionNode) and element.kind.elidable


def find_chains(doc: Document) -> List[Chain]:
    """
    Enumerate the maximal release/transfer/receive chains of `doc`.

    Raises DanglingChainError for a chain that stops before reaching a
    surviving node or is never entered from a surviving node, and
    ChainCycleError for one that loops inside itself or returns to its start.
    """
    out_flows: Dict[str, List[FlowEdge]] = {}
    for flow in doc.flows:
        out_flows.setdefault(flow.src, []).append(flow)

    chains: List[Chain] = []

    def walk(entry: FlowEdge, path: Tuple[str, ...]) -> None:
        successors = out_flows.get(path[-1], [])
        if not successors:
            raise DanglingChainError((entry.src,) + path, "chain ends without a surviving endpoint")
        for flow in successors:
            if _is_elidable(doc, flow.dst):
                if flow.dst in path:
                    raise ChainCycleError((entry.src,) + path + (flow.dst,), "chain loops back on itself")
                walk(entry, path + (flow.dst,))
            elif flow.dst == entry.src:
                raise ChainCycleError((entry.src,) + path + (flow.dst,), "chain returns to its start")
            else:
                chains.append(Chain(entry.src, path, flow.dst, entry))

    for flow in doc.flows:
        if flow.src in doc.elements and not _is_elidable(doc, flow.src) and _is_elidable(doc, flow.dst):
            walk(flow, (flow.dst,))

    covered = {node for chain in chains for node in chain.nodes}
    uncovered = sorted(a.id for a in doc.actions() if a.kind.elidable and a.id not in covered)
    if uncovered:
        raise DanglingChainError(uncovered, "chain has no surviving endpoint upstream")
    return chains


def _remap_candidates(doc: Document, node: str, chain: Chain) -> List[str]:
    """Surviving endpoints for an elided trigger endpoint, preferred first"""
    upstream, downstream = chain.start, chain.end
    owner = doc.owner_of(node)
    if doc.owner_of(upstream) == owner:
        return [upstream, downstream]
    if doc.owner_of(downstream) == owner:
        return [downstream, upstream]
    kind = doc.get(node).kind
    if kind is ActionKind.RELEASE:
        return [upstream, downstream]
    if kind is ActionKind.RECEIVE:
        return [downstream, upstream]
    if chain.nodes.index(node) < len(chain.nodes) / 2:
        return [upstream, downstream]
    return [downstream, upstream]


def _remap_target(doc: Document, node: str, chains_of: Dict[str, List[int]], chains: List[Chain]) -> Optional[str]:
    chain = chains[chains_of[node][0]]
    for candidate in _remap_candidates(doc, node, chain):
        if isinstance(doc.get(candidate), ActionNode):
            return candidate
    return None


def simplify_level1(doc: Document) -> Tuple[Document, SimplificationMap]:
    """Collapse release/transfer/receive chains; the input is left unchanged"""
    chains = find_chains(doc)
    if not chains:
        return doc, OrderedDict()

    elided: Set[str] = {node for chain in chains for node in chain.nodes}
    taken: Set[str] = {edge.id for edge in doc.edges()}
    mapping: SimplificationMap = OrderedDict()
    chains_of: Dict[str, List[int]] = {}
    chain_ids: List[str] = []

    flows: List[FlowEdge] = [f for f in doc.flows if f.src not in elided and f.dst not in elided]
    for index, chain in enumerate(chains):
        new_id = edge_id("flow", chain.start, chain.end, taken)
        flows.append(FlowEdge(new_id, chain.start, chain.end, chain.entry.scope, chain.nodes,
                              chain.entry.span, chain.entry.decl))
        mapping[new_id] = chain.nodes
        chain_ids.append(new_id)
        for node in chain.nodes:
            chains_of.setdefault(node, []).append(index)
        logger.debug(f"Collapsed {chain.start} -> {' -> '.join(chain.nodes)} -> {chain.end} into {new_id}")
    flows.sort(key=lambda f: (f.decl, f.id))

    triggers: List[TriggerEdge] = []
    for trigger in doc.triggers:
        if trigger.src not in elided and trigger.dst not in elided:
            triggers.append(trigger)
            continue
        src = _remap_target(doc, trigger.src, chains_of, chains) if trigger.src in elided else trigger.src
        dst = _remap_target(doc, trigger.dst, chains_of, chains) if trigger.dst in elided else trigger.dst
        if src is None or dst is None or src == dst:
            logger.debug(f"Dropped {trigger.id}: no distinct surviving endpoints")
            continue
        new_id = edge_id("trigger", src, dst, taken)
        logger.debug(f"Remapped {trigger.id} to {new_id}")
        triggers.append(replace(trigger, id=new_id, src=src, dst=dst))

    edge_ids_of = {node: [chain_ids[i] for i in indices] for node, indices in chains_of.items()}
    events = []
    for event in doc.events:
        covers: List[str] = []
        for ref in event.covers:
            for new_ref in edge_ids_of.get(ref, [ref]):
                if new_ref not in covers:
                    covers.append(new_ref)
        events.append(replace(event, covers=tuple(covers)))

    elements = OrderedDict()
    for element_id, element in doc.elements.items():
        if element_id in elided:
            continue
        if isinstance(element, Thimac):
            element = replace(element, children=tuple(c for c in element.children if c not in elided))
        elements[element_id] = element

    simplified = replace(doc, elements=dict(elements), flows=tuple(flows), triggers=tuple(triggers),
                         events=tuple(events))
    logger.info(f"Simplified '{doc.name}': {len(elided)} node(s) elided, {len(mapping)} replacement flow(s)")
    return simplified, mapping


def provenance_ids(mapping: SimplificationMap) -> FrozenSet[str]:
    """Union of every provenance list"""
    return frozenset(node for nodes in mapping.values() for node in nodes)


def mark_implicit(doc: Document) -> Document:
    """Set the implicit render hint on every create and process node"""
    offending = [a.id for a in doc.actions() if a.kind.elidable]
    if offending:
        raise ModeError(f"implicit notation needs a simplified model; found {', '.join(offending)}")
    return _set_implicit(doc, True)


def unmark_implicit(doc: Document) -> Document:
    return _set_implicit(doc, False)


def _set_implicit(doc: Document, flag: bool) -> Document:
    elements = {}
    for element_id, element in doc.elements.items():
        if isinstance(element, ActionNode) and element.kind in (ActionKind.CREATE, ActionKind.PROCESS):
            element = replace(element, implicit=flag)
        elements[element_id] = element
    return replace(doc, elements=elements)


def flow_graph(doc: Document) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(e.id for e in doc.actions())
    graph.add_nodes_from(e.id for e in doc.storages())
    graph.add_edges_from((f.src, f.dst) for f in doc.flows if f.src in graph and f.dst in graph)
    return graph


def flow_reachability(doc: Document, nodes: Optional[Iterable[str]] = None) -> FrozenSet[Tuple[str, str]]:
    """
    Pairs (u, v) such that v is reachable from u over one or more flows,
    restricted to `nodes` when given.
    """
    graph = flow_graph(doc)
    keep = set(graph.nodes) if nodes is None else set(nodes) & set(graph.nodes)
    # reflexive=False: (u, u) only when u lies on a cycle
    closure = nx.transitive_closure(graph, reflexive=False)
    return frozenset((u, v) for u, v in closure.edges if u in keep and v in keep)
