import math

import pytest

from prolate_fd.pswf import BandTimeSpec, build_basis

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def basis10():
    """c = 10 with T = 1, W = 10; enough prolates to pass the transition."""
    return build_basis(BandTimeSpec(T=1.0, W=10.0), 14)


@pytest.fixture(scope="session")
def basis5():
    return build_basis(BandTimeSpec(T=1.0, W=5.0), 10)


@pytest.fixture(scope="session")
def sym10():
    """c = 10 with T = W = sqrt(10), the filter-diagonalization setting."""
    r = math.sqrt(10.0)
    return build_basis(BandTimeSpec(T=r, W=r), 10)


def record_acceptance(number, passed, detail):
    line = "CRITERION %2d: %s  %s" % (number, "PASS" if passed else "FAIL", detail)
    ACCEPTANCE_LINES.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
