import numpy as np
import pytest

from qpeh.model import dimer_occupation, hopping_dispersion


@pytest.fixture(scope="session")
def hopping():
    return hopping_dispersion()


@pytest.fixture(scope="session")
def dimer():
    return dimer_occupation()


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """record(number, ok, detail): one summary line per acceptance criterion."""
    log = request.config.stash[ACCEPTANCE]

    def record(number, ok, detail):
        log.append((number, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(log, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
