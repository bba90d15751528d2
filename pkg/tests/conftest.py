import numpy as np
import pytest

_REPORT = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per acceptance criterion; printed after the run."""

    def record(label, passed, detail=""):
        _REPORT.append(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
