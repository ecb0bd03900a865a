import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and "criterion" in report.nodeid:
        key = report.nodeid.split("::")[-1].split("[")[0]
        prev = _acceptance.get(key, ("passed", 0.0))
        outcome = report.outcome if report.outcome != "passed" else prev[0]
        _acceptance[key] = (outcome, prev[1] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, seconds) in sorted(_acceptance.items()):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  ({seconds:.1f} s)")
