from __future__ import annotations

from collections import defaultdict

import numpy as np
import pytest

from nopanet import REFERENCE_PARAMS
from nopanet.optimizer import feasible

_criteria: dict[int, str] = {}
_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion this test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    _criteria[n] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[n].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _outcomes[n]
        ok = bool(results) and all(results)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {_criteria[n]}  ({sum(results)}/{len(results)} checks)")


def haar_unitary(rng: np.random.Generator, n: int = 6) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def feasible_unitaries(rng: np.random.Generator, count: int, params=REFERENCE_PARAMS) -> list[np.ndarray]:
    out = []
    while len(out) < count:
        u = haar_unitary(rng)
        if feasible(u, params):
            out.append(u)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def params():
    return REFERENCE_PARAMS
