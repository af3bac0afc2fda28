#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
corpus.py - Golden corpus verification for tmc

Every case lives in its own directory:

    corpus/<case>/model.tm
    corpus/<case>/source.txt              (optional domain text)
    corpus/<case>/expected/*.golden       canonical, narrative, traces, coverage
    corpus/<case>/expected/expectations.json

expectations.json keys (all optional):

    events            number of declared events
    strict_valid      whether Strict validation yields no errors
    accepted_traces   comma-separated traces that must be accepted
    rejected_traces   comma-separated traces that must be rejected
    trace_count       number of traces at max_loop=1
    alt_branches      branch count of every Alt, in leaf order
    loops             number of Loop nodes
    narrative_contains substrings that must occur in this order

Golden files are compared byte for byte and only rewritten on request.
"""

import json
import os
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from tqdm import tqdm

from core import TmError, TmSyntaxError, has_errors
from dsl_generator import print_canonical
from dsl_parser import parse
from dynamics import accepts_trace, enumerate_traces, parse_trace
from model import Alt, BehaviorExpr, Document, Loop, Par, Seq, stats
from narrative_generator import coverage_report, narrate_chronology
from transform import flow_reachability, simplify_level1
from validator import Mode, check_static, validate

logger = logging.getLogger(__name__)

MODEL_FILE = "model.tm"
EXPECTED_DIR = "expected"
EXPECTATIONS_FILE = "expectations.json"


@dataclass
class CaseResult:
    name: str
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return f.read()


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def alt_branch_counts(expr: Optional[BehaviorExpr]) -> List[int]:
    if expr is None:
        return []
    if isinstance(expr, Seq):
        return [n for item in expr.items for n in alt_branch_counts(item)]
    if isinstance(expr, (Alt, Par)):
        inner = [n for branch in expr.branches for n in alt_branch_counts(branch)]
        return ([len(expr.branches)] if isinstance(expr, Alt) else []) + inner
    if isinstance(expr, Loop):
        return alt_branch_counts(expr.body)
    return []


def loop_count(expr: Optional[BehaviorExpr]) -> int:
    if isinstance(expr, Seq):
        return sum(loop_count(item) for item in expr.items)
    if isinstance(expr, (Alt, Par)):
        return sum(loop_count(branch) for branch in expr.branches)
    if isinstance(expr, Loop):
        return 1 + loop_count(expr.body)
    return 0


def golden_outputs(doc: Document, case_dir: str) -> Dict[str, Callable[[], str]]:
    """Golden file name -> producer of its current text"""
    outputs: Dict[str, Callable[[], str]] = {"canonical.golden": lambda: print_canonical(doc)}
    if doc.chronology is not None:
        outputs["narrative.golden"] = lambda: narrate_chronology(doc) + "\n"
        outputs["traces.golden"] = lambda: "".join(
            ",".join(trace) + "\n" for trace in enumerate_traces(doc.chronology, 1, 1000).traces
        )
    if doc.source is not None:
        source_path = os.path.join(case_dir, doc.source)
        outputs["coverage.golden"] = lambda: coverage_report(_read(source_path), doc.annotations)[0].format()
    return outputs


def _check_expectations(doc: Document, expectations: Dict, result: CaseResult) -> None:
    if "events" in expectations and stats(doc).events != expectations["events"]:
        result.failures.append(f"expected {expectations['events']} events, found {stats(doc).events}")
    if "strict_valid" in expectations:
        valid = not has_errors(validate(doc, Mode.STRICT))
        if valid != expectations["strict_valid"]:
            result.failures.append(f"strict validity is {valid}, expected {expectations['strict_valid']}")

    chron = doc.chronology
    declared = doc.event_ids()
    for text in expectations.get("accepted_traces", []):
        if chron is None or not accepts_trace(chron, parse_trace(text), declared):
            result.failures.append(f"trace {text} rejected")
    for text in expectations.get("rejected_traces", []):
        if chron is not None and accepts_trace(chron, parse_trace(text), declared):
            result.failures.append(f"trace {text} accepted")
    if "trace_count" in expectations and chron is not None:
        count = len(enumerate_traces(chron, 1, 100000).traces)
        if count != expectations["trace_count"]:
            result.failures.append(f"{count} traces at max_loop=1, expected {expectations['trace_count']}")
    if "alt_branches" in expectations and alt_branch_counts(chron) != expectations["alt_branches"]:
        result.failures.append(f"alternatives {alt_branch_counts(chron)}, expected {expectations['alt_branches']}")
    if "loops" in expectations and loop_count(chron) != expectations["loops"]:
        result.failures.append(f"{loop_count(chron)} loops, expected {expectations['loops']}")

    if expectations.get("narrative_contains") and chron is not None:
        narrative, cursor = narrate_chronology(doc), 0
        for fragment in expectations["narrative_contains"]:
            found = narrative.find(fragment, cursor)
            if found < 0:
                result.failures.append(f"narrative lacks {fragment!r} (in order)")
                break
            cursor = found + len(fragment)


def _check_simplification(doc: Document, result: CaseResult) -> None:
    if has_errors(check_static(doc, Mode.STRICT)):
        return
    simplified, _ = simplify_level1(doc)
    leftovers = [a.id for a in simplified.actions() if a.kind.elidable]
    if leftovers:
        result.failures.append(f"simplified model keeps {', '.join(leftovers)}")
    survivors = [a.id for a in simplified.actions()] + [s.id for s in simplified.storages()]
    if flow_reachability(doc, survivors) != flow_reachability(simplified, survivors):
        result.failures.append("simplification changed flow reachability")
    if has_errors(check_static(simplified, Mode.SIMPLIFIED)):
        result.failures.append("simplified model is not valid in simplified mode")


def verify_case(case_dir: str, update_golden: bool = False) -> CaseResult:
    """Run every check of one corpus case; problems become failures, never exceptions"""
    result = CaseResult(os.path.basename(os.path.normpath(case_dir)))
    try:
        doc = parse(_read(os.path.join(case_dir, MODEL_FILE)))
    except TmSyntaxError as e:
        result.failures.append(f"parse: {e}")
        return result
    except (OSError, UnicodeDecodeError) as e:
        result.failures.append(f"cannot read model: {e}")
        return result

    expected_dir = os.path.join(case_dir, EXPECTED_DIR)
    try:
        expectations_path = os.path.join(expected_dir, EXPECTATIONS_FILE)
        if os.path.exists(expectations_path):
            _check_expectations(doc, json.loads(_read(expectations_path)), result)
        _check_simplification(doc, result)

        for name, produce in golden_outputs(doc, case_dir).items():
            path = os.path.join(expected_dir, name)
            actual = produce()
            if update_golden:
                os.makedirs(expected_dir, exist_ok=True)
                _write(path, actual)
                logger.info(f"Updated {path}")
            elif not os.path.exists(path):
                result.failures.append(f"{name} is missing")
            elif _read(path) != actual:
                result.failures.append(f"{name} differs from the current output")
    except (TmError, OSError, ValueError) as e:
        result.failures.append(f"{type(e).__name__}: {e}")

    logger.debug(f"Corpus case {result.name}: {'pass' if result.passed else 'fail'}")
    return result


def corpus_verify(directory: str, update_golden: bool = False, show_progress: bool = False) -> List[CaseResult]:
    """Verify every case directory below `directory`, in name order"""
    cases = sorted(
        os.path.join(directory, name) for name in os.listdir(directory)
        if os.path.isfile(os.path.join(directory, name, MODEL_FILE))
    )
    return [verify_case(case, update_golden) for case in tqdm(cases, desc="Corpus", disable=not show_progress)]
