#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
main.py - Command-line entry point for tmc

This module binds the parser, validator, transforms, simulator, renderers
and text generators into the `tm` command:

    tm check FILE|DIR [--mode strict|simplified] [--jobs N]
    tm simplify FILE [-o OUT] [--map]
    tm render FILE --view static|dynamic|chronology --format dot|svg [--implicit] [--events IDS] [-o OUT]
    tm simulate FILE (--trace IDS | --enumerate [--max-loop K] [--max-traces N] | --next IDS)
    tm narrate FILE [--static]
    tm coverage FILE
    tm corpus [DIR] [--update-golden]

Exit codes: 0 success, 1 validation/semantic errors, 2 usage error, 3 I/O error.
Diagnostics and log records go to stderr, artifacts to stdout or -o.
"""

import os
import sys
import enum
import argparse
import logging
import datetime
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple
from tqdm import tqdm

from core import (
    Diagnostic, GeneratorFactory, NoChronologyError, OutputHandler, Severity, TmError, TmSyntaxError,
    has_errors,
)
from dsl_parser import parse, parse_with_diagnostics
from dynamics import accepts_trace, enumerate_traces, next_events, parse_trace, viable_prefix_length
from layout import Format, RenderOptions, View
from model import Document
from transform import mark_implicit, simplify_level1
from validator import Mode, check_static, validate

# Configure logging
logging.basicConfig(
    level=logging.WARNING,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

DEFAULT_CORPUS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "corpus")

_COLORS = {Severity.ERROR: "\033[31m", Severity.WARNING: "\033[33m"}
_RESET = "\033[0m"


class ExitCode(enum.IntEnum):
    OK = 0
    ERRORS = 1
    USAGE = 2
    IO = 3


def use_color(stream) -> bool:
    """TM_COLOR=1/0 forces colour on/off; otherwise colour only on a terminal"""
    setting = os.environ.get("TM_COLOR")
    if setting in ("0", "1"):
        return setting == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def format_diagnostic(diagnostic: Diagnostic, filename: str, color: bool = False) -> str:
    text = diagnostic.format(filename)
    if color:
        level = diagnostic.severity.value
        text = _COLORS[diagnostic.severity] + level + _RESET + text[len(level):]
    return text


def read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return f.read()


def check_file(path: str, mode: Mode) -> Tuple[int, List[Diagnostic]]:
    """Parse and validate one file; returns its exit code and diagnostics"""
    try:
        text = read_text(path)
    except (OSError, UnicodeDecodeError) as e:
        logger.debug(f"Cannot read {path}: {e}")
        return ExitCode.IO, []
    doc, diagnostics = parse_with_diagnostics(text)
    if doc is not None:
        diagnostics = validate(doc, mode)
    return (ExitCode.ERRORS if has_errors(diagnostics) else ExitCode.OK), diagnostics


class TmcApp:
    """Main application class for tmc"""

    def __init__(self):
        self.current_file = "<input>"

    @property
    def stdout(self):
        return sys.stdout

    @property
    def stderr(self):
        return sys.stderr

    def build_parser(self) -> argparse.ArgumentParser:
        """Build the argument parser with one subparser per command"""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument(
            "--verbose",
            action="store_true",
            help="Enable verbose logging"
        )
        common.add_argument(
            "--quiet",
            action="store_true",
            help="Only log errors"
        )
        common.add_argument(
            "--no-progress",
            action="store_true",
            help="Disable progress bars"
        )

        parser = argparse.ArgumentParser(
            prog="tm",
            description="tmc - Thinging Machine model compiler",
            formatter_class=argparse.ArgumentDefaultsHelpFormatter
        )
        commands = parser.add_subparsers(dest="command", metavar="COMMAND")
        commands.required = True

        def command(name: str, help_text: str) -> argparse.ArgumentParser:
            return commands.add_parser(
                name, help=help_text, parents=[common],
                formatter_class=argparse.ArgumentDefaultsHelpFormatter
            )

        check = command("check", "Parse and validate a .tm file or every .tm file below a directory")
        check.add_argument("path", metavar="FILE|DIR")
        check.add_argument(
            "--mode",
            choices=[m.value for m in Mode],
            default=Mode.STRICT.value,
            help="Rule set to validate against"
        )
        check.add_argument(
            "--jobs",
            type=int,
            default=4,
            help="Worker threads when checking a directory"
        )
        check.set_defaults(handler=self.cmd_check)

        simplify = command("simplify", "Delete release/transfer/receive and print the canonical model")
        simplify.add_argument("file", metavar="FILE")
        simplify.add_argument("-o", "--output", help="Write the model to this file instead of stdout")
        simplify.add_argument(
            "--map",
            action="store_true",
            help="Print the simplification map to stderr"
        )
        simplify.set_defaults(handler=self.cmd_simplify)

        render = command("render", "Render a view of the model as DOT or SVG")
        render.add_argument("file", metavar="FILE")
        render.add_argument("--view", choices=[v.value for v in View], default=View.STATIC.value,
                            help="Diagram family to draw")
        render.add_argument("--format", choices=[f.value for f in Format], default=Format.DOT.value,
                            help="Output format")
        render.add_argument("--implicit", action="store_true",
                            help="Draw create/process implicitly (simplified models only)")
        render.add_argument("--events", help="Comma-separated event ids drawn by the dynamic view")
        render.add_argument("-o", "--output", help="Write the diagram to this file instead of stdout")
        render.set_defaults(handler=self.cmd_render)

        simulate = command("simulate", "Check, step or enumerate traces of the chronology")
        simulate.add_argument("file", metavar="FILE")
        action = simulate.add_mutually_exclusive_group(required=True)
        action.add_argument("--trace", help="Comma-separated trace to accept or reject")
        action.add_argument("--enumerate", action="store_true", help="List the traces of the chronology")
        action.add_argument("--next", metavar="PREFIX", help="Comma-separated prefix; print the eligible next events")
        simulate.add_argument("--max-loop", type=int, default=1, help="Maximum unrolling of every loop")
        simulate.add_argument("--max-traces", type=int, default=1000, help="Maximum number of traces listed")
        simulate.set_defaults(handler=self.cmd_simulate)

        narrate = command("narrate", "Print the chronology as text")
        narrate.add_argument("file", metavar="FILE")
        narrate.add_argument("--static", action="store_true", help="Describe the static model instead")
        narrate.set_defaults(handler=self.cmd_narrate)

        coverage = command("coverage", "Report how much of the domain text the events annotate")
        coverage.add_argument("file", metavar="FILE")
        coverage.set_defaults(handler=self.cmd_coverage)

        corpus = command("corpus", "Verify the golden corpus")
        corpus.add_argument("directory", metavar="DIR", nargs="?", default=DEFAULT_CORPUS)
        corpus.add_argument("--update-golden", action="store_true", help="Rewrite the golden files")
        corpus.set_defaults(handler=self.cmd_corpus)
        return parser

    def parse_arguments(self, argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
        """Parse command line arguments"""
        return self.build_parser().parse_args(argv)

    def setup_environment(self, args: argparse.Namespace) -> None:
        """Setup the environment based on arguments"""
        if args.verbose:
            logging.getLogger().setLevel(logging.DEBUG)
            logger.debug("Verbose logging enabled")
        elif args.quiet:
            logging.getLogger().setLevel(logging.ERROR)
        else:
            logging.getLogger().setLevel(logging.WARNING)
        self.color = use_color(self.stderr)
        self.progress_disabled = args.no_progress or not self.stderr.isatty()

    # Helpers

    def _error(self, message: str) -> None:
        self.stderr.write(f"error: {message}\n")

    def _print_diagnostics(self, diagnostics: Sequence[Diagnostic], filename: str) -> None:
        for diagnostic in diagnostics:
            self.stderr.write(format_diagnostic(diagnostic, filename, self.color) + "\n")

    def _load(self, path: str) -> Document:
        self.current_file = path
        return parse(read_text(path))

    # Commands

    def cmd_check(self, args: argparse.Namespace) -> int:
        mode = Mode(args.mode)
        if not os.path.isdir(args.path):
            self.current_file = args.path
            code, diagnostics = check_file(args.path, mode)
            if code == ExitCode.IO:
                self._error(f"cannot read {args.path}")
            self._print_diagnostics(diagnostics, args.path)
            return code

        paths = sorted(
            os.path.join(root, name)
            for root, _, names in os.walk(args.path)
            for name in names if name.endswith(".tm")
        )
        logger.info(f"Checking {len(paths)} file(s) below {args.path} with {args.jobs} worker(s)")
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            results = list(tqdm(
                pool.map(lambda p: check_file(p, mode), paths),
                total=len(paths), desc="Checking", disable=self.progress_disabled
            ))
        worst = ExitCode.OK
        for path, (code, diagnostics) in zip(paths, results):
            if code == ExitCode.IO:
                self._error(f"cannot read {path}")
            self._print_diagnostics(diagnostics, path)
            worst = max(worst, code)
        return worst

    def cmd_simplify(self, args: argparse.Namespace) -> int:
        doc = self._load(args.file)
        diagnostics = check_static(doc, Mode.STRICT)
        if has_errors(diagnostics):
            self._print_diagnostics(diagnostics, args.file)
            return ExitCode.ERRORS
        simplified, mapping = simplify_level1(doc)
        if args.map:
            for edge_id, nodes in mapping.items():
                self.stderr.write(f"{edge_id}: {' '.join(nodes)}\n")
        generator = GeneratorFactory.create_generator("dsl")
        OutputHandler(args.output, self.stdout).write_artifacts(generator.generate(simplified))
        return ExitCode.OK

    def cmd_render(self, args: argparse.Namespace) -> int:
        doc = self._load(args.file)
        if args.implicit:
            doc = mark_implicit(doc)
        event_filter = frozenset(parse_trace(args.events)) if args.events is not None else None
        opts = RenderOptions(View(args.view), Format(args.format), args.implicit, event_filter)
        generator = GeneratorFactory.create_generator(args.format)
        OutputHandler(args.output, self.stdout).write_artifacts(generator.generate(doc, options=opts))
        return ExitCode.OK

    def cmd_simulate(self, args: argparse.Namespace) -> int:
        doc = self._load(args.file)
        if doc.chronology is None:
            raise NoChronologyError(doc.name)
        declared = doc.event_ids()
        if args.trace is not None:
            trace = parse_trace(args.trace)
            if accepts_trace(doc.chronology, trace, declared):
                self.stdout.write("ACCEPTED\n")
                return ExitCode.OK
            k = viable_prefix_length(doc.chronology, trace, declared)
            self.stdout.write(f"REJECTED after {k} events\n")
            return ExitCode.ERRORS
        if args.next is not None:
            events = next_events(doc.chronology, parse_trace(args.next), declared)
            self.stdout.write(",".join(sorted(events)) + "\n")
            return ExitCode.OK
        if args.max_loop < 1 or args.max_traces < 1:
            self._error("--max-loop and --max-traces must be at least 1")
            return ExitCode.USAGE
        result = enumerate_traces(doc.chronology, args.max_loop, args.max_traces)
        for trace in result.traces:
            self.stdout.write(",".join(trace) + "\n")
        return ExitCode.OK

    def cmd_narrate(self, args: argparse.Namespace) -> int:
        doc = self._load(args.file)
        generator = GeneratorFactory.create_generator("static" if args.static else "narrative")
        OutputHandler(None, self.stdout).write_artifacts(generator.generate(doc))
        return ExitCode.OK

    def cmd_coverage(self, args: argparse.Namespace) -> int:
        doc = self._load(args.file)
        if doc.source is None:
            self._error(f"model '{doc.name}' declares no source text")
            return ExitCode.ERRORS
        source_path = os.path.join(os.path.dirname(os.path.abspath(args.file)), doc.source)
        source_text = read_text(source_path)
        generator = GeneratorFactory.create_generator("coverage")
        artifacts = generator.generate(doc, source_text=source_text)
        self._print_diagnostics(generator.diagnostics, args.file)
        OutputHandler(None, self.stdout).write_artifacts(artifacts)
        return ExitCode.OK

    def cmd_corpus(self, args: argparse.Namespace) -> int:
        from corpus import corpus_verify
        results = corpus_verify(args.directory, update_golden=args.update_golden,
                                show_progress=not self.progress_disabled)
        for result in results:
            if result.passed:
                self.stdout.write(f"PASS {result.name}\n")
            for failure in result.failures:
                self.stdout.write(f"FAIL {result.name}: {failure}\n")
        return ExitCode.OK if results and all(r.passed for r in results) else ExitCode.ERRORS

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """Run the application"""
        try:
            args = self.parse_arguments(argv)
        except SystemExit as e:
            # argparse exits 0 for --help and 2 for usage errors
            return ExitCode.OK if e.code in (0, None) else ExitCode.USAGE

        self.setup_environment(args)
        start_time = datetime.datetime.now()
        try:
            code = args.handler(args)
        except TmSyntaxError as e:
            self._print_diagnostics(e.diagnostics, self.current_file)
            code = ExitCode.ERRORS
        except TmError as e:
            self._error(str(e))
            code = ExitCode.ERRORS
        except (OSError, UnicodeDecodeError) as e:
            self._error(f"I/O failure: {e}")
            code = ExitCode.IO
        except Exception as e:
            logger.error(f"Error: {str(e)}", exc_info=True)
            code = ExitCode.ERRORS
        logger.debug(f"tm {args.command} finished with exit code {int(code)} in {datetime.datetime.now() - start_time}")
        return int(code)


if __name__ == "__main__":
    app = TmcApp()
    sys.exit(app.run())
