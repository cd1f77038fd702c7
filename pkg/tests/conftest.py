import json

import pytest

from ocalign import datasets
from ocalign.log import extract_process_executions


@pytest.fixture(scope="session")
def packaging():
    net = datasets.packaging_net()
    (px,) = extract_process_executions(datasets.packaging_log())
    return px, net


@pytest.fixture(scope="session")
def loan():
    net = datasets.loan_net()
    (px,) = extract_process_executions(datasets.loan_log_noisy())
    return px, net


@pytest.fixture
def packaging_files(tmp_path):
    log = tmp_path / "log.json"
    net = tmp_path / "net.json"
    log.write_text(json.dumps(datasets.PACKAGING_LOG))
    net.write_text(json.dumps(datasets.PACKAGING_NET))
    return log, net


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
