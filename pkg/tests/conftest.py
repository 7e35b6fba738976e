import numpy as np
import pytest

from nonloc import grid


@pytest.fixture(scope="session")
def gauss1d():
    """e^{-x^2} sampled at h = 0.02."""
    fn = grid.gaussian(0.0, 1.0, 1)
    return fn, grid.sample(fn, 0.02)


@pytest.fixture(scope="session")
def gauss2d():
    fn = grid.gaussian([0.0, 0.0], [1.0, 1.0], 2)
    return fn, grid.sample(fn, 0.04)


@pytest.fixture(scope="session")
def unit_interval():
    fn = grid.box_indicator([0.0], [1.0])
    return fn, grid.sample(fn, 0.01)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion and assert it."""
    log = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(cid: str, ok: bool, detail: str) -> None:
        line = f"{cid}: {'PASS' if ok else 'FAIL'}  {detail}"
        log[cid] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(log, key=lambda c: (int("".join(ch for ch in c[1:] if ch.isdigit()) or 0), c)):
        terminalreporter.write_line(log[cid])
