#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
dsl_lexer.py - Tokenizer for the .tm textual syntax

Words are lexed as IDENT; keywords are recognised by the parser in context,
so a thimac may be named `process` and an action may be named `create`.
Comments run from `//` to end of line. Strings are double-quoted and accept
only the escapes \\" and \\\\.

Spans carry byte offsets into the UTF-8 encoding of the input plus a 1-based
line and column (columns count characters).
"""

import enum
import itertools
from dataclasses import dataclass
from typing import List, Tuple

from core import Diagnostic, Severity, SourceSpan

MAX_INT_DIGITS = 18


class TokenType(enum.Enum):
    IDENT = "identifier"
    STRING = "string"
    INT = "integer"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LPAREN = "'('"
    RPAREN = "')'"
    COLON = "':'"
    AT = "'@'"
    DOT = "'.'"
    DOTDOT = "'..'"
    ARROW = "'->'"
    TRIGGER_ARROW = "'-->'"
    COMMA = "','"
    SEMI = "';'"
    PIPE = "'|'"
    EOF = "end of input"


_SINGLE = {
    "{": TokenType.LBRACE,
    "}": TokenType.RBRACE,
    "(": TokenType.LPAREN,
    ")": TokenType.RPAREN,
    ":": TokenType.COLON,
    "@": TokenType.AT,
    ",": TokenType.COMMA,
    ";": TokenType.SEMI,
    "|": TokenType.PIPE,
}


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: str
    span: SourceSpan

    def describe(self) -> str:
        if self.type in (TokenType.IDENT, TokenType.INT):
            return f"{self.type.value} '{self.value}'"
        if self.type is TokenType.STRING:
            return "string"
        return self.type.value


def _is_ident_start(ch: str) -> bool:
    return ch == "_" or ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or ("0" <= ch <= "9")


class Lexer:
    """
    Converts source text into tokens, collecting lexical diagnostics
    """
    def __init__(self, text: str):
        self.text = text
        # byte offset of every character index, plus one past the end
        self._bytes = list(itertools.accumulate((len(ch.encode("utf-8")) for ch in text), initial=0))
        self._pos = 0
        self._line = 1
        self._line_start = 0
        self.diagnostics: List[Diagnostic] = []

    def tokenize(self) -> Tuple[List[Token], List[Diagnostic]]:
        tokens: List[Token] = []
        text = self.text
        while True:
            self._skip_trivia()
            if self._pos >= len(text):
                tokens.append(Token(TokenType.EOF, "", self._span(self._pos, self._pos)))
                return tokens, self.diagnostics
            start = self._pos
            ch = text[start]
            if _is_ident_start(ch):
                end = start + 1
                while end < len(text) and _is_ident_char(text[end]):
                    end += 1
                tokens.append(self._token(TokenType.IDENT, text[start:end], start, end))
            elif "0" <= ch <= "9":
                end = start + 1
                while end < len(text) and "0" <= text[end] <= "9":
                    end += 1
                value = text[start:end]
                if end - start > MAX_INT_DIGITS:
                    digits = end - start
                    self._error("SYN003", f"integer too large ({digits} digits; at most {MAX_INT_DIGITS})", start, end)
                    # placeholder so parsing continues
                    value = "0"
                tokens.append(self._token(TokenType.INT, value, start, end))
            elif ch == '"':
                token = self._string()
                if token is not None:
                    tokens.append(token)
            elif text.startswith("-->", start):
                tokens.append(self._token(TokenType.TRIGGER_ARROW, "-->", start, start + 3))
            elif text.startswith("->", start):
                tokens.append(self._token(TokenType.ARROW, "->", start, start + 2))
            elif text.startswith("..", start):
                tokens.append(self._token(TokenType.DOTDOT, "..", start, start + 2))
            elif ch == ".":
                tokens.append(self._token(TokenType.DOT, ".", start, start + 1))
            elif ch in _SINGLE:
                tokens.append(self._token(_SINGLE[ch], ch, start, start + 1))
            else:
                self._error("SYN003", f"invalid character {ch!r}", start, start + 1)
                self._pos = start + 1

    def _skip_trivia(self) -> None:
        text = self.text
        while self._pos < len(text):
            ch = text[self._pos]
            if ch == "\n":
                self._pos += 1
                self._line += 1
                self._line_start = self._pos
            elif ch in " \t\r\f\v":
                self._pos += 1
            elif text.startswith("//", self._pos):
                newline = text.find("\n", self._pos)
                self._pos = len(text) if newline < 0 else newline
            else:
                return

    def _string(self):
        text = self.text
        start = self._pos
        pos = start + 1
        chars = []
        while pos < len(text):
            ch = text[pos]
            if ch == '"':
                self._pos = pos + 1
                return self._token(TokenType.STRING, "".join(chars), start, pos + 1)
            if ch == "\n":
                break
            if ch == "\\":
                nxt = text[pos + 1] if pos + 1 < len(text) else ""
                if nxt in ('"', "\\"):
                    chars.append(nxt)
                    pos += 2
                    continue
                self._error("SYN003", f"invalid escape sequence '\\{nxt}'", pos, min(pos + 2, len(text)))
                pos += 1
                continue
            chars.append(ch)
            pos += 1
        self._error("SYN002", "unterminated string", start, pos)
        self._pos = pos
        return None

    def _token(self, token_type: TokenType, value: str, start: int, end: int) -> Token:
        self._pos = end
        return Token(token_type, value, self._span(start, end))

    def _span(self, start: int, end: int) -> SourceSpan:
        return SourceSpan(self._bytes[start], self._bytes[end], self._line, start - self._line_start + 1)

    def _error(self, code: str, message: str, start: int, end: int) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, code, message, self._span(start, end)))


def tokenize(text: str) -> Tuple[List[Token], List[Diagnostic]]:
    """Tokenize `text`; the token list always ends with an EOF token"""
    return Lexer(text).tokenize()
