from pathlib import Path

import pytest

from mayektts.g2p import default_mapping
from mayektts.normalize import default_rules
from mayektts.script import default_classes

FIXTURE = Path(__file__).parent / "fixtures" / "corpus"


@pytest.fixture(scope="session")
def classes():
    return default_classes()


@pytest.fixture(scope="session")
def rules():
    return default_rules()


@pytest.fixture(scope="session")
def mapping():
    return default_mapping()


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE


@pytest.fixture(scope="session")
def fixture_lines():
    """(id, raw_text) pairs of the bundled corpus."""
    out = []
    for line in (FIXTURE / "list.txt").read_text(encoding="utf-8").splitlines():
        utt_id, _, raw = line.partition("|")
        out.append((utt_id, raw))
    return out


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
