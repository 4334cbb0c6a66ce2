import json
import shutil
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def truth():
    with open(FIXTURES / "corpus_truth.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def corpus_copy(tmp_path):
    """A writable copy of the fixture corpus (ingest unpacks archives in place)."""
    dest = tmp_path / "corpus"
    shutil.copytree(FIXTURES / "corpus", dest)
    return dest


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
