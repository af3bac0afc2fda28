#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
dsl_parser.py - Recursive descent parser for the .tm textual syntax

    document   := "model" STRING "{" item* "}"
    item       := thimac | action | store | flow | trigger | event
                | chronology | source | annotate
    thimac     := "thimac" IDENT label? "{" item* "}"
    action     := "action" IDENT ":" kind label?
    store      := "store" IDENT label?
    flow       := "flow" ref "->" ref
    trigger    := "trigger" ref "-->" ref
    event      := "event" IDENT STRING "covers" "{" ref ("," ref)* "}" ("time" STRING)?
    chronology := "chronology" "{" behavior "}"
    behavior   := term (";" term)*
    term       := IDENT | "alt" "{" behavior ("|" behavior)+ "}"
                | "loop" ("(" STRING ")")? "{" behavior "}"
                | "par" "{" behavior ("|" behavior)+ "}"
    source     := "source" STRING
    annotate   := "annotate" IDENT "spans" INT ".." INT ("," INT ".." INT)*

Error recovery
--------------
A syntax error inside a declaration is recorded and the parser skips tokens
until the next declaration keyword or a closing brace, then carries on. One
run therefore reports every independent error. A document is only produced
when no error was recorded.
"""

import logging
from dataclasses import replace
from typing import Dict, List, Optional, Set, Tuple

from core import Diagnostic, Severity, SourceSpan, TmSyntaxError, has_errors, sort_diagnostics
from dsl_lexer import Token, TokenType, tokenize
from model import (
    ActionKind, ActionNode, Alt, Annotation, BehaviorExpr, Document, Element, Event,
    EventRef, FlowEdge, Loop, Par, Seq, StorageNode, Thimac, TriggerEdge,
)

logger = logging.getLogger(__name__)

ITEM_KEYWORDS = frozenset({
    "thimac", "action", "store", "flow", "trigger", "event", "chronology", "source", "annotate",
})
ACTION_KINDS: Dict[str, ActionKind] = {kind.value: kind for kind in ActionKind}
MAX_NESTING = 100


class _ParseFailure(Exception):
    """Unwinds to the enclosing item loop after a diagnostic is recorded"""


def edge_id(prefix: str, src: str, dst: str, taken: Set[str]) -> str:
    """Allocate `flow:a->b` / `trigger:a-->b`, suffixing #2, #3... on repeats"""
    arrow = "->" if prefix == "flow" else "-->"
    base = f"{prefix}:{src}{arrow}{dst}"
    candidate, n = base, 1
    while candidate in taken:
        n += 1
        candidate = f"{base}#{n}"
    taken.add(candidate)
    return candidate


class Parser:
    """
    Recursive descent parser producing a Document from tokens
    """
    def __init__(self, tokens: List[Token]):
        self._tokens = tokens
        self._pos = 0
        self._depth = 0
        self._decl = 0
        self.diagnostics: List[Diagnostic] = []

        self._elements: Dict[str, Element] = {}
        self._children: Dict[str, List[str]] = {}
        self._sibling_names: Dict[str, Set[str]] = {}
        self._roots: List[str] = []
        self._flows: List[FlowEdge] = []
        self._triggers: List[TriggerEdge] = []
        self._edge_ids: Set[str] = set()
        self._events: List[Event] = []
        self._event_ids: Set[str] = set()
        self._chronology: Optional[BehaviorExpr] = None
        self._chronology_seen = False
        self._source: Optional[str] = None
        self._source_seen = False
        self._annotations: List[Annotation] = []

    # Navigation

    @property
    def _current(self) -> Token:
        return self._tokens[min(self._pos, len(self._tokens) - 1)]

    def _peek(self, offset: int = 1) -> Token:
        return self._tokens[min(self._pos + offset, len(self._tokens) - 1)]

    def _advance(self) -> Token:
        token = self._current
        if token.type is not TokenType.EOF:
            self._pos += 1
        return token

    def _at_keyword(self, word: str) -> bool:
        return self._current.type is TokenType.IDENT and self._current.value == word

    def _error(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, code, message, span))

    def _fail(self, expected: str) -> None:
        token = self._current
        self._error("SYN001", f"expected {expected}, found {token.describe()}", token.span)
        raise _ParseFailure()

    def _expect(self, token_type: TokenType, expected: Optional[str] = None) -> Token:
        if self._current.type is not token_type:
            self._fail(expected or token_type.value)
        return self._advance()

    def _expect_keyword(self, word: str) -> Token:
        if not self._at_keyword(word):
            self._fail(f"'{word}'")
        return self._advance()

    def _next_decl(self) -> int:
        self._decl += 1
        return self._decl

    def _enter(self) -> None:
        if self._depth >= MAX_NESTING:
            self._error("SYN007", f"nesting deeper than {MAX_NESTING} levels", self._current.span)
            raise _ParseFailure()
        self._depth += 1

    def _synchronize(self, start: int) -> None:
        if self._pos == start:
            self._advance()
        while True:
            token = self._current
            if token.type in (TokenType.EOF, TokenType.RBRACE):
                return
            if token.type is TokenType.IDENT and token.value in ITEM_KEYWORDS:
                return
            self._advance()

    # Document

    def parse_document(self) -> Optional[Document]:
        try:
            self._expect_keyword("model")
            name = self._expect(TokenType.STRING, "model name string").value
            self._expect(TokenType.LBRACE)
        except _ParseFailure:
            return None
        self._items("")
        if self._current.type is TokenType.RBRACE:
            self._advance()
        else:
            self._error("SYN001", f"expected '}}', found {self._current.describe()}", self._current.span)
        if self._current.type is not TokenType.EOF:
            self._error("SYN001", f"expected end of input, found {self._current.describe()}", self._current.span)
        if has_errors(self.diagnostics):
            return None
        return Document(
            name=name,
            elements=dict(self._elements),
            roots=tuple(self._roots),
            flows=tuple(self._flows),
            triggers=tuple(self._triggers),
            events=tuple(self._events),
            chronology=self._chronology,
            source=self._source,
            annotations=tuple(self._annotations),
        )

    def _items(self, scope: str) -> None:
        while self._current.type not in (TokenType.RBRACE, TokenType.EOF):
            start = self._pos
            try:
                self._item(scope)
            except _ParseFailure:
                self._synchronize(start)

    def _item(self, scope: str) -> None:
        token = self._current
        if token.type is not TokenType.IDENT or token.value not in ITEM_KEYWORDS:
            self._fail("a declaration")
        handler = getattr(self, f"_parse_{token.value}")
        handler(scope)

    def _label(self) -> Optional[int]:
        if self._current.type is not TokenType.AT:
            return None
        self._advance()
        return int(self._expect(TokenType.INT, "label number").value)

    def _ref(self) -> Tuple[str, SourceSpan]:
        first = self._expect(TokenType.IDENT, "reference")
        parts = [first.value]
        end = first.span
        while self._current.type is TokenType.DOT:
            self._advance()
            token = self._expect(TokenType.IDENT, "identifier after '.'")
            parts.append(token.value)
            end = token.span
        return ".".join(parts), SourceSpan(first.span.byte_start, end.byte_end, first.span.line, first.span.column)

    def _claim_name(self, scope: str, name_token: Token) -> bool:
        names = self._sibling_names.setdefault(scope, set())
        if name_token.value in names:
            self._error("SYN004", f"duplicate name '{name_token.value}' in '{scope or 'model'}'", name_token.span)
            return False
        names.add(name_token.value)
        return True

    def _add_node(self, scope: str, element: Element) -> None:
        self._elements[element.id] = element
        if scope:
            self._children.setdefault(scope, []).append(element.id)
        else:
            self._roots.append(element.id)

    # Static declarations

    def _parse_thimac(self, scope: str) -> None:
        keyword = self._advance()
        name = self._expect(TokenType.IDENT, "thimac name")
        label = self._label()
        self._expect(TokenType.LBRACE)
        decl = self._next_decl()
        thimac_id = f"{scope}.{name.value}" if scope else name.value
        registered = self._claim_name(scope, name)
        if not registered:
            # parse the body under a shadow scope so its names do not clash
            thimac_id = f"{thimac_id}#{decl}"
        else:
            span = SourceSpan(keyword.span.byte_start, name.span.byte_end, keyword.span.line, keyword.span.column)
            self._add_node(scope, Thimac(thimac_id, name.value, scope, label, (), span, decl))
        self._enter()
        try:
            self._items(thimac_id)
            self._expect(TokenType.RBRACE)
        finally:
            self._depth -= 1
        if registered:
            children = tuple(self._children.get(thimac_id, ()))
            self._elements[thimac_id] = replace(self._elements[thimac_id], children=children)

    def _parse_action(self, scope: str) -> None:
        keyword = self._advance()
        name = self._expect(TokenType.IDENT, "action name")
        self._expect(TokenType.COLON)
        kind_token = self._current
        if kind_token.type is not TokenType.IDENT or kind_token.value not in ACTION_KINDS:
            self._fail("action kind (create, process, release, transfer or receive)")
        self._advance()
        label = self._label()
        span = SourceSpan(keyword.span.byte_start, name.span.byte_end, keyword.span.line, keyword.span.column)
        if not scope:
            self._error("SYN005", f"action '{name.value}' must be declared inside a thimac", span)
            return
        if self._claim_name(scope, name):
            action_id = f"{scope}.{name.value}"
            kind = ACTION_KINDS[kind_token.value]
            self._add_node(scope, ActionNode(action_id, name.value, kind, scope, label, False, span, self._next_decl()))

    def _parse_store(self, scope: str) -> None:
        keyword = self._advance()
        name = self._expect(TokenType.IDENT, "store name")
        label = self._label()
        span = SourceSpan(keyword.span.byte_start, name.span.byte_end, keyword.span.line, keyword.span.column)
        if not scope:
            self._error("SYN005", f"store '{name.value}' must be declared inside a thimac", span)
            return
        if self._claim_name(scope, name):
            self._add_node(scope, StorageNode(f"{scope}.{name.value}", name.value, scope, label, span, self._next_decl()))

    def _parse_flow(self, scope: str) -> None:
        keyword = self._advance()
        src, _ = self._ref()
        self._expect(TokenType.ARROW)
        dst, end = self._ref()
        span = SourceSpan(keyword.span.byte_start, end.byte_end, keyword.span.line, keyword.span.column)
        flow_id = edge_id("flow", src, dst, self._edge_ids)
        self._flows.append(FlowEdge(flow_id, src, dst, scope, (), span, self._next_decl()))

    def _parse_trigger(self, scope: str) -> None:
        keyword = self._advance()
        src, _ = self._ref()
        self._expect(TokenType.TRIGGER_ARROW)
        dst, end = self._ref()
        span = SourceSpan(keyword.span.byte_start, end.byte_end, keyword.span.line, keyword.span.column)
        trigger_id = edge_id("trigger", src, dst, self._edge_ids)
        self._triggers.append(TriggerEdge(trigger_id, src, dst, scope, span, self._next_decl()))

    # Dynamic declarations

    def _parse_event(self, scope: str) -> None:
        keyword = self._advance()
        name = self._expect(TokenType.IDENT, "event id")
        description = self._expect(TokenType.STRING, "event description string").value
        self._expect_keyword("covers")
        self._expect(TokenType.LBRACE)
        covers = [self._ref()[0]]
        while self._current.type is TokenType.COMMA:
            self._advance()
            covers.append(self._ref()[0])
        self._expect(TokenType.RBRACE)
        time = None
        if self._at_keyword("time"):
            self._advance()
            time = self._expect(TokenType.STRING, "time string").value
        span = SourceSpan(keyword.span.byte_start, name.span.byte_end, keyword.span.line, keyword.span.column)
        if name.value in self._event_ids:
            self._error("SYN004", f"duplicate event id '{name.value}'", name.span)
            return
        self._event_ids.add(name.value)
        self._events.append(Event(name.value, description, tuple(covers), time, span))

    def _parse_chronology(self, scope: str) -> None:
        keyword = self._advance()
        self._expect(TokenType.LBRACE)
        behavior = self._behavior()
        self._expect(TokenType.RBRACE)
        if self._chronology_seen:
            self._error("SYN006", "chronology already declared", keyword.span)
            return
        self._chronology_seen = True
        self._chronology = behavior

    def _behavior(self) -> BehaviorExpr:
        terms = [self._term()]
        while self._current.type is TokenType.SEMI:
            self._advance()
            terms.append(self._term())
        return terms[0] if len(terms) == 1 else Seq(tuple(terms))

    def _term(self) -> BehaviorExpr:
        token = self._current
        if token.type is not TokenType.IDENT:
            self._fail("event id, 'alt', 'loop' or 'par'")
        nxt = self._peek().type
        if token.value in ("alt", "par") and nxt is TokenType.LBRACE:
            return self._branching(token.value)
        if token.value == "loop" and nxt in (TokenType.LBRACE, TokenType.LPAREN):
            return self._loop()
        self._advance()
        return EventRef(token.value, token.span)

    def _branching(self, word: str) -> BehaviorExpr:
        self._advance()
        self._expect(TokenType.LBRACE)
        self._enter()
        try:
            branches = [self._behavior()]
            while self._current.type is TokenType.PIPE:
                self._advance()
                branches.append(self._behavior())
            if len(branches) < 2:
                self._fail(f"'|' (a {word} needs at least two branches)")
            self._expect(TokenType.RBRACE)
        finally:
            self._depth -= 1
        return Alt(tuple(branches)) if word == "alt" else Par(tuple(branches))

    def _loop(self) -> BehaviorExpr:
        self._advance()
        guard = None
        if self._current.type is TokenType.LPAREN:
            self._advance()
            guard = self._expect(TokenType.STRING, "loop guard string").value
            self._expect(TokenType.RPAREN)
        self._expect(TokenType.LBRACE)
        self._enter()
        try:
            body = self._behavior()
            self._expect(TokenType.RBRACE)
        finally:
            self._depth -= 1
        return Loop(body, guard)

    # Domain text

    def _parse_source(self, scope: str) -> None:
        keyword = self._advance()
        path = self._expect(TokenType.STRING, "source path string").value
        if self._source_seen:
            self._error("SYN006", "source already declared", keyword.span)
            return
        self._source_seen = True
        self._source = path

    def _parse_annotate(self, scope: str) -> None:
        keyword = self._advance()
        event = self._expect(TokenType.IDENT, "event id")
        self._expect_keyword("spans")
        spans = [self._byte_range()]
        while self._current.type is TokenType.COMMA:
            self._advance()
            spans.append(self._byte_range())
        span = SourceSpan(keyword.span.byte_start, event.span.byte_end, keyword.span.line, keyword.span.column)
        self._annotations.append(Annotation(event.value, tuple(spans), span))

    def _byte_range(self) -> Tuple[int, int]:
        start = int(self._expect(TokenType.INT, "byte offset").value)
        self._expect(TokenType.DOTDOT)
        end = int(self._expect(TokenType.INT, "byte offset").value)
        return start, end


def parse_with_diagnostics(text: str) -> Tuple[Optional[Document], List[Diagnostic]]:
    """Parse `text`; never raises. The document is None when errors were found."""
    tokens, diagnostics = tokenize(text)
    parser = Parser(tokens)
    doc = parser.parse_document()
    diagnostics = sort_diagnostics(diagnostics + parser.diagnostics)
    if has_errors(diagnostics):
        doc = None
    logger.debug(f"Parsed {len(tokens)} tokens with {len(diagnostics)} diagnostic(s)")
    return doc, diagnostics


def parse(text: str) -> Document:
    """Parse `text` into a Document, raising TmSyntaxError on any error"""
    doc, diagnostics = parse_with_diagnostics(text)
    if doc is None:
        raise TmSyntaxError(diagnostics)
    return doc
