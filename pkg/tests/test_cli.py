# -*- coding: utf-8 -*-
"""
test_cli.py - The tm command: exit codes, stdout artifacts and stderr diagnostics
"""

import xml.etree.ElementTree as ET

import pytest

from conftest import CASES, CORPUS_DIR, PIPELINE, model_path, read_case
from main import ExitCode, TmcApp

BAD_FLOW = """model "bad" {
  thimac T {
    action t: transfer
    action p: process
    flow T.t -> T.p
  }
}
"""


def tm(*argv):
    return TmcApp().run(list(argv))


@pytest.fixture
def bad_file(tmp_path):
    path = tmp_path / "bad.tm"
    path.write_text(BAD_FLOW, encoding="utf-8")
    return str(path)


@pytest.fixture
def pipeline_file(tmp_path):
    path = tmp_path / "pipeline.tm"
    path.write_text(PIPELINE, encoding="utf-8")
    return str(path)


@pytest.mark.parametrize("case", CASES)
def test_check_corpus_model_is_silent(capsys, case):
    assert tm("check", model_path(case)) == ExitCode.OK
    out, err = capsys.readouterr()
    assert (out, err) == ("", "")


def test_check_reports_rule_violations(capsys, bad_file, monkeypatch):
    monkeypatch.setenv("TM_COLOR", "0")
    assert tm("check", bad_file) == ExitCode.ERRORS
    lines = capsys.readouterr().err.splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"ERROR V3 {bad_file}:5:")
    assert "transfer -> process" in lines[0]


def test_check_color_can_be_forced(capsys, bad_file, monkeypatch):
    monkeypatch.setenv("TM_COLOR", "1")
    tm("check", bad_file)
    assert capsys.readouterr().err.startswith("\033[31mERROR\033[0m V3 ")


def test_check_directory_reports_worst_code(capsys, tmp_path, bad_file):
    (tmp_path / "good.tm").write_text(read_case("sales"), encoding="utf-8")
    assert tm("check", str(tmp_path), "--jobs", "2") == ExitCode.ERRORS
    assert "ERROR V3" in capsys.readouterr().err
    assert tm("check", CORPUS_DIR) == ExitCode.OK


def test_check_directory_survives_oversized_integers(capsys, tmp_path, bad_file):
    (tmp_path / "huge.tm").write_text('model "h" { thimac T @' + "7" * 5000 + " { store s } }", encoding="utf-8")
    assert tm("check", str(tmp_path)) == ExitCode.ERRORS
    err = capsys.readouterr().err
    assert "SYN003" in err and "integer too large" in err
    assert "ERROR V3" in err


def test_check_syntax_errors(capsys, tmp_path):
    path = tmp_path / "broken.tm"
    path.write_text('model "x" {\n  thimac {\n}\n', encoding="utf-8")
    assert tm("check", str(path)) == ExitCode.ERRORS
    assert capsys.readouterr().err.startswith("ERROR SYN")


def test_check_simplified_mode(capsys):
    assert tm("check", model_path("sales"), "--mode", "simplified") == ExitCode.ERRORS
    assert "V6" in capsys.readouterr().err


def test_missing_file_is_an_io_error(capsys, tmp_path):
    missing = str(tmp_path / "missing.tm")
    assert tm("check", missing) == ExitCode.IO
    assert "cannot read" in capsys.readouterr().err
    assert tm("narrate", missing) == ExitCode.IO


@pytest.mark.parametrize("argv", [
    [],
    ["check"],
    ["frobnicate", "x.tm"],
    ["check", "x.tm", "--bogus"],
    ["render", "x.tm", "--view", "sideways"],
    ["simulate", "x.tm"],
])
def test_usage_errors(capsys, argv):
    assert TmcApp().run(argv) == ExitCode.USAGE


def test_simulate_trace(capsys):
    sales = model_path("sales")
    assert tm("simulate", sales, "--trace", "E1,E2,E3,E4,E5,E6") == ExitCode.OK
    assert capsys.readouterr().out == "ACCEPTED\n"
    assert tm("simulate", sales, "--trace", "E1,E3") == ExitCode.ERRORS
    assert capsys.readouterr().out == "REJECTED after 1 events\n"


def test_simulate_next(capsys):
    assert tm("simulate", model_path("h2s"), "--next", "E1,E2,E4,E3,E5,E6,E7") == ExitCode.OK
    assert capsys.readouterr().out == "E14,E8\n"
    assert tm("simulate", model_path("sales"), "--next", "") == ExitCode.OK
    assert capsys.readouterr().out == "E1\n"


def test_simulate_enumerate(capsys):
    assert tm("simulate", model_path("h2s"), "--enumerate") == ExitCode.OK
    assert capsys.readouterr().out == read_case("h2s", "expected/traces.golden")
    assert tm("simulate", model_path("milk"), "--enumerate", "--max-traces", "2") == ExitCode.OK
    assert len(capsys.readouterr().out.splitlines()) == 2
    assert tm("simulate", model_path("milk"), "--enumerate", "--max-loop", "0") == ExitCode.USAGE


def test_simulate_without_chronology(capsys, pipeline_file):
    assert tm("simulate", pipeline_file, "--enumerate") == ExitCode.ERRORS
    assert capsys.readouterr().err == "error: model 'pipeline' declares no chronology\n"


def test_render_to_stdout_and_file(capsys, tmp_path):
    assert tm("render", model_path("sales"), "--view", "chronology") == ExitCode.OK
    assert capsys.readouterr().out.startswith('digraph "sales" {\n')
    out = tmp_path / "diagrams" / "h2s.svg"
    assert tm("render", model_path("h2s"), "--view", "dynamic", "--format", "svg",
              "--events", "E8,E10", "-o", str(out)) == ExitCode.OK
    root = ET.parse(str(out)).getroot()
    events = [g.get("id") for g in root.iter("{http://www.w3.org/2000/svg}g") if g.get("class") == "event"]
    assert events == ["event-E8", "event-E10"]


def test_render_errors(capsys, tmp_path):
    assert tm("render", model_path("h2s"), "--view", "dynamic", "--events", "E99") == ExitCode.ERRORS
    assert capsys.readouterr().err == "error: event filter names undeclared event(s): E99\n"
    assert tm("render", model_path("sales"), "--implicit") == ExitCode.ERRORS
    assert capsys.readouterr().err.startswith("error: ")


def test_simplify_then_render_implicit(capsys, tmp_path):
    simplified = str(tmp_path / "sales.simple.tm")
    assert tm("simplify", model_path("sales"), "-o", simplified, "--map") == ExitCode.OK
    out, err = capsys.readouterr()
    assert out == ""
    assert ("flow:System.newSale.bill.create->User.bill.process: System.newSale.bill.release "
            "System.newSale.bill.transfer Cashier.bill.transfer") in err
    with open(simplified, encoding="utf-8") as f:
        text = f.read()
    assert ": transfer" not in text
    assert tm("check", simplified, "--mode", "simplified") == ExitCode.OK
    assert tm("render", simplified, "--implicit") == ExitCode.OK
    assert "shape=point" in capsys.readouterr().out


def test_simplify_refuses_invalid_models(capsys, bad_file):
    assert tm("simplify", bad_file) == ExitCode.ERRORS
    assert "V3" in capsys.readouterr().err


def test_narrate(capsys):
    assert tm("narrate", model_path("sales")) == ExitCode.OK
    assert capsys.readouterr().out == read_case("sales", "expected/narrative.golden")
    assert tm("narrate", model_path("sales"), "--static") == ExitCode.OK
    assert capsys.readouterr().out.startswith("- User (@1)\n")


def test_coverage(capsys, pipeline_file):
    assert tm("coverage", model_path("h2s")) == ExitCode.OK
    assert capsys.readouterr().out == read_case("h2s", "expected/coverage.golden")
    assert tm("coverage", pipeline_file) == ExitCode.ERRORS
    assert "declares no source text" in capsys.readouterr().err


def test_corpus_command(capsys):
    assert tm("corpus", CORPUS_DIR) == ExitCode.OK
    assert capsys.readouterr().out == "".join(f"PASS {case}\n" for case in sorted(CASES))


def test_verbose_logging_goes_to_log_records(caplog, capsys):
    with caplog.at_level("DEBUG"):
        assert tm("check", CORPUS_DIR, "--verbose") == ExitCode.OK
    assert any("Checking 3 file(s)" in r.getMessage() for r in caplog.records)
