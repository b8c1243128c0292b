import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spinor_moment.scales import CODATA_CGS

settings.register_profile("physics", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("physics")


@pytest.fixture
def scales():
    return CODATA_CGS


@pytest.fixture
def lam():
    return CODATA_CGS.compton_radius()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def report(request):
    """Record one acceptance line: report(number, ok, detail)."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def _report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
