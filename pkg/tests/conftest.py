import math

import pytest

from ionphase import _backend

GAMMA = 2.0 * math.pi * 19.6e6
LAMBDA = 369.5e-9

BACKENDS = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def gamma():
    return GAMMA


# acceptance results, printed one line per criterion at the end of the run
ACCEPTANCE_RESULTS = []


def record_acceptance(criterion, passed, detail):
    ACCEPTANCE_RESULTS.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
