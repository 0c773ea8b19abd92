import numpy as np
import pytest
from hypothesis import settings

from chuasync.coupling import make_linear, make_linear_plus_arctan, make_saturated
from chuasync.model import EXAMPLE1, EXAMPLE2
from chuasync.topology import Topology

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

_criteria = {}


@pytest.fixture
def ex1():
    return EXAMPLE1


@pytest.fixture
def ex2():
    return EXAMPLE2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


REGISTERED = {
    "linear": lambda: make_linear(2.0),
    "linear_arctan": lambda: make_linear_plus_arctan(3.0),
    "saturated": lambda: make_saturated(2.0, 1.0),
}


@pytest.fixture(params=sorted(REGISTERED))
def any_coupling(request):
    return REGISTERED[request.param]()


def random_topology(rng, n, directed=False):
    upper = rng.random((n, n)) < 0.5
    if directed:
        adj = upper.astype(int)
    else:
        adj = np.triu(upper, 1).astype(int)
        adj = adj + adj.T
    np.fill_diagonal(adj, 0)
    return Topology(adj)


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _criteria.get(crit, "PASS")
        _criteria[crit] = "PASS" if report.passed and prev == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria, key=lambda c: int(c.split()[0])):
        terminalreporter.write_line(f"[{_criteria[crit]}] criterion {crit}")
