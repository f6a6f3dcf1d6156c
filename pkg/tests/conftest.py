import numpy as np
import pytest

from oracles import random_tiny_instance

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def tiny_instances():
    rng = np.random.default_rng(12345)
    return [random_tiny_instance(rng) for _ in range(100)]


@pytest.fixture
def record_criterion(request):
    """Log ``(passed, detail)`` for an acceptance criterion; shown in the terminal summary."""
    log = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number, passed, detail):
        log[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        passed, detail = log[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
