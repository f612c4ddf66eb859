from pathlib import Path

import numpy as np
import pytest

from entkit.state import BipartiteState

DATA = Path(__file__).resolve().parent.parent / "data"
R2 = np.sqrt(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def s1():
    """Product state |0>|0>."""
    return BipartiteState(np.array([[1.0, 0.0], [0.0, 0.0]]))


@pytest.fixture
def s2():
    """Maximally entangled (|00> + |11>)/sqrt(2)."""
    return BipartiteState(np.array([[R2, 0.0], [0.0, R2]]))


@pytest.fixture
def s3():
    """sqrt(3)/2 |00> + 1/2 |11>."""
    return BipartiteState(np.diag([np.sqrt(3) / 2, 0.5]))


@pytest.fixture
def data_dir():
    return DATA


_acceptance: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    status = "PASS" if report.passed else "FAIL"
    _acceptance.append((props["criterion"], status, props.get("summary", "")))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, summary in sorted(_acceptance, key=lambda t: int(t[0].split()[0])):
        line = f"[{status}] criterion {name}"
        if summary:
            line += f": {summary}"
        terminalreporter.write_line(line)
