import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line for the criterion under test."""
    entry = {}
    yield entry
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    line = f"[{'PASS' if ok else 'FAIL'}] {entry.get('name', request.node.name)}: {entry.get('detail', '')}"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
