# -*- coding: utf-8 -*-
"""
conftest.py - Shared fixtures for the tmc test suite
"""

import os

import pytest

from dsl_parser import parse

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CORPUS_DIR = os.path.join(ROOT, "corpus")
CASES = ("sales", "h2s", "milk")


def read_case(case: str, name: str = "model.tm") -> str:
    with open(os.path.join(CORPUS_DIR, case, name), "r", encoding="utf-8", newline="") as f:
        return f.read()


def model_path(case: str) -> str:
    return os.path.join(CORPUS_DIR, case, "model.tm")


@pytest.fixture(scope="session")
def corpus_docs():
    return {case: parse(read_case(case)) for case in CASES}


@pytest.fixture(scope="session")
def sales(corpus_docs):
    return corpus_docs["sales"]


@pytest.fixture(scope="session")
def h2s(corpus_docs):
    return corpus_docs["h2s"]


@pytest.fixture(scope="session")
def milk(corpus_docs):
    return corpus_docs["milk"]


# One thimac per interesting node kind; used by rule and transform tests.
PIPELINE = """
model "pipeline" {
  thimac A {
    action create: create
    action release: release
    action transfer: transfer
    flow A.create -> A.release
    flow A.release -> A.transfer
  }
  thimac B {
    action transfer: transfer
    action receive: receive
    action process: process
    store log
    flow B.transfer -> B.receive
    flow B.receive -> B.process
    flow B.process -> B.log
  }
  flow A.transfer -> B.transfer
  trigger B.process --> A.create
}
"""


@pytest.fixture
def pipeline():
    return parse(PIPELINE)
