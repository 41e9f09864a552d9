import sys
import time

import pytest

from mcids.benchmark import run_bench
from mcids.corpus import GenConfig, generate_corpus

_timings = {}


@pytest.fixture(scope="session")
def default_corpus():
    start = time.monotonic()
    corpus = generate_corpus(GenConfig())
    _timings["generate"] = time.monotonic() - start
    return corpus


@pytest.fixture(scope="session")
def generation_seconds(default_corpus):
    return _timings["generate"]


@pytest.fixture(scope="session")
def default_report(default_corpus):
    return run_bench(default_corpus)


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        passed, detail = results[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if passed else 'FAIL'} - {detail}")
