import functools

import pytest

from nhbdi.calculus import build_table
from nhbdi.scenario import homogeneous, running_example


@functools.lru_cache(maxsize=None)
def running_table(delay=10.0, nu0=0.0, i0=1, t_end=500.0):
    return build_table(running_example(delay, nu0=nu0, i0=i0, t_end=t_end))


@functools.lru_cache(maxsize=None)
def homogeneous_table(lam, mu, nu=0.0, i0=1, t_end=40.0, dt=0.01):
    return build_table(homogeneous(lam, mu, nu, i0=i0, t_end=t_end, dt=dt))


@pytest.fixture
def running():
    return running_table()


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(res.line)
