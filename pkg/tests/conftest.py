import numpy as np
import pytest

from mubkit.clifford import enumerate_group
from mubkit.gf import field_for_q

ALL_Q = (2, 3, 4, 5, 7, 8, 9)
SMALL_Q = (2, 3, 4, 5)

_criteria: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    n, text = marker.args
    ok = rep.passed if rep.when == "call" else False
    prev = _criteria.get(n, (text, True))
    _criteria[n] = (text, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture(scope="session")
def fields():
    return {q: field_for_q(q) for q in ALL_Q}


@pytest.fixture(scope="session")
def groups():
    class Lazy(dict):
        def __missing__(self, q):
            self[q] = enumerate_group(field_for_q(q))
            return self[q]
    return Lazy()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
