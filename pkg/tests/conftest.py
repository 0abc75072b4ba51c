import re
from importlib import resources

import pytest

from annosent.ingest import parse_jsonl
from annosent.lexicon import seed_lexicon

_acceptance_results = {}


@pytest.fixture(scope="session")
def lexicon():
    return seed_lexicon()


@pytest.fixture
def sample_report():
    return parse_jsonl(resources.files("annosent.data").joinpath("sample.jsonl").read_bytes())


@pytest.fixture
def sample_path():
    with resources.as_file(resources.files("annosent.data").joinpath("sample.jsonl")) as p:
        yield p


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    match = re.match(r"test_ac(\d+)", report.nodeid.split("::")[-1])
    if not match:
        return
    key = int(match.group(1))
    _acceptance_results[key] = _acceptance_results.get(key, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance_results):
        status = "PASS" if _acceptance_results[key] else "FAIL"
        terminalreporter.write_line(f"AC{key}: {status}")
