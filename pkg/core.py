#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
core.py - Core classes for the tmc Thinging Machine model compiler

This module provides the foundational classes used throughout tmc: the error
hierarchy, source spans and diagnostics, the artifact produced by every
generator, the generator base class and factory, and the output handler that
writes artifacts to stdout or files.
"""

import os
import sys
import enum
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence

logger = logging.getLogger(__name__)


class TmError(Exception):
    """Base class of every error raised by tmc"""


class UnknownRefError(TmError):
    """A dotted reference or element id names nothing in the document"""

    def __init__(self, ref: str):
        super().__init__(f"unknown reference '{ref}'")
        self.ref = ref


class UnknownEventError(TmError):
    """A trace or filter names an event that is not declared"""

    def __init__(self, event_id: str):
        super().__init__(f"unknown event '{event_id}'")
        self.event_id = event_id


class DanglingChainError(TmError):
    """A release/transfer/receive chain has no surviving endpoint on one side"""

    def __init__(self, chain: Sequence[str], reason: str = "chain has no surviving endpoint"):
        super().__init__(f"{reason}: {', '.join(chain)}")
        self.chain = list(chain)


class ChainCycleError(TmError):
    """A release/transfer/receive chain runs in a circle instead of joining two surviving nodes"""

    def __init__(self, chain: Sequence[str], reason: str = "chain forms a cycle"):
        super().__init__(f"{reason}: {' -> '.join(chain)}")
        self.chain = list(chain)


class ModeError(TmError):
    """The document is not in the mode the operation requires"""


class ViewError(TmError):
    """The requested render view cannot be produced for the document"""


class NoChronologyError(TmError):
    """The document declares no chronology"""

    def __init__(self, name: str = ""):
        super().__init__(f"model '{name}' declares no chronology" if name else "no chronology declared")


class TmSyntaxError(TmError):
    """Parsing failed; carries every error diagnostic found"""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        errors = [d for d in diagnostics if d.severity is Severity.ERROR]
        first = errors[0].message if errors else "syntax error"
        super().__init__(f"{len(errors)} syntax error(s); first: {first}")
        self.diagnostics = list(diagnostics)


class Severity(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


@dataclass(frozen=True)
class SourceSpan:
    """Byte range in the source text plus the 1-based position of its start"""
    byte_start: int
    byte_end: int
    line: int
    column: int


@dataclass(frozen=True)
class Diagnostic:
    """A rule violation or syntax problem attached to a source span"""
    severity: Severity
    code: str
    message: str
    span: Optional[SourceSpan] = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self):
        if self.span is None:
            return (1, 0, 0, self.code, self.message)
        return (0, self.span.byte_start, self.span.byte_end, self.code, self.message)

    def format(self, filename: str = "<input>") -> str:
        """Render as `LEVEL CODE file:line:col message`"""
        line, column = (self.span.line, self.span.column) if self.span else (0, 0)
        return f"{self.severity.value} {self.code} {filename}:{line}:{column} {self.message}"


def sort_diagnostics(diagnostics: Sequence[Diagnostic]) -> List[Diagnostic]:
    """Order diagnostics by source position, spanless ones last"""
    return sorted(diagnostics, key=Diagnostic.sort_key)


def has_errors(diagnostics: Sequence[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class TmArtifact:
    """
    A generated text artifact (DSL, DOT, SVG, narrative, report)
    """
    def __init__(self, name: str, artifact_type: str, text: str = ""):
        self.name = name
        self.artifact_type = artifact_type
        self.text = text

    def __str__(self) -> str:
        return f"{self.artifact_type} {self.name}"


class ArtifactGenerator(ABC):
    """
    Abstract base class for artifact generators
    """
    artifact_type = "TEXT"

    def __init__(self):
        self.artifacts: List[TmArtifact] = []

    @abstractmethod
    def generate(self, doc, **kwargs) -> List[TmArtifact]:
        """Generate artifacts for the given document"""
        pass

    def get_artifacts(self) -> List[TmArtifact]:
        """Get the generated artifacts"""
        return self.artifacts

    def _emit(self, name: str, text: str) -> TmArtifact:
        artifact = TmArtifact(name, self.artifact_type, text)
        self.artifacts.append(artifact)
        return artifact


class GeneratorFactory:
    """
    Factory for creating artifact generators by output kind
    """
    KINDS = ("dsl", "dot", "svg", "narrative", "static", "coverage")

    @staticmethod
    def create_generator(kind: str) -> ArtifactGenerator:
        """Create the generator for one output kind"""
        from dsl_generator import CanonicalGenerator
        from dot_generator import DotGenerator
        from svg_generator import SvgGenerator
        from narrative_generator import NarrativeGenerator, StaticNarrativeGenerator, CoverageGenerator

        generators = {
            "dsl": CanonicalGenerator,
            "dot": DotGenerator,
            "svg": SvgGenerator,
            "narrative": NarrativeGenerator,
            "static": StaticNarrativeGenerator,
            "coverage": CoverageGenerator,
        }
        if kind not in generators:
            raise ValueError(f"unknown generator kind '{kind}'")
        return generators[kind]()


class OutputHandler:
    """
    Handles output for generated artifacts
    """
    def __init__(self, output_path: Optional[str] = None, stream=None):
        self.output_path = output_path
        self.stream = stream if stream is not None else sys.stdout

    def write_artifacts(self, artifacts: Sequence[TmArtifact]) -> None:
        """Write artifacts to the output file, or to the stream when no file is set"""
        text = "".join(self._terminated(a.text) for a in artifacts)
        if self.output_path:
            directory = os.path.dirname(self.output_path)
            if directory and not os.path.exists(directory):
                os.makedirs(directory)
            # newline="" keeps artifact bytes identical across platforms
            with open(self.output_path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            logger.info(f"Wrote {len(artifacts)} artifact(s) to {self.output_path}")
        else:
            self.stream.write(text)
            self.stream.flush()

    @staticmethod
    def _terminated(text: str) -> str:
        return text if text.endswith("\n") or not text else text + "\n"
