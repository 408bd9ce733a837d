"""Shared fixtures plus the acceptance summary printer."""

import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=200,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(987234)


_CRIT = re.compile(r"test_criterion_(\d+)")
_outcomes: dict = {}


def pytest_runtest_logreport(report):
    m = _CRIT.search(report.nodeid)
    if m is None or "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        crit = int(m.group(1))
        _outcomes[crit] = _outcomes.get(crit, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for crit in sorted(_outcomes):
        verdict = "PASS" if _outcomes[crit] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {crit}: {verdict}")
