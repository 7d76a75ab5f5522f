import math

import numpy as np
import pytest

from nhbdi.calculus import build_table, interp, make_grid
from nhbdi.exceptions import ConfigError, RangeError
from nhbdi.scenario import homogeneous, running_example

from conftest import homogeneous_table, running_table


def test_initial_values_and_monotonicity(running):
    for col in ("s", "sigma", "n", "l", "m"):
        assert running.column(col)[0] == 0.0
    for col in ("sigma", "l", "m"):
        assert np.all(np.diff(running.column(col)) >= 0)


def test_identity_l_minus_m(running):
    resid = running.l_fn - running.m_fn - (1.0 - np.exp(-running.s))
    assert np.max(np.abs(resid)) < 1e-8


def test_homogeneous_closed_forms():
    lam, mu = 0.3, 0.1
    a = lam - mu
    tab = homogeneous_table(lam, mu)
    t = tab.grid[1:]
    sigma = -np.expm1(-a * t) / a
    assert np.max(np.abs(tab.sigma[1:] / sigma - 1)) < 1e-10
    assert np.max(np.abs(tab.l_fn[1:] / (lam * sigma) - 1)) < 1e-10
    assert np.max(np.abs(tab.m_fn[1:] / (mu * sigma) - 1)) < 1e-10
    # at a t = 1
    assert interp(tab, "l", 5.0) == pytest.approx(0.9481808382428, abs=1e-11)
    assert interp(tab, "m", 5.0) == pytest.approx(0.3160602794143, abs=1e-11)


def test_zero_drift():
    tab = homogeneous_table(0.2, 0.2, 0.0, t_end=10.0)
    assert np.all(tab.s == 0)
    assert np.allclose(tab.sigma, tab.grid, rtol=0, atol=1e-13)
    assert np.all(tab.n_fn == 0)


def test_n_is_nu_times_sigma_for_constant_nu():
    tab = running_table(nu0=0.2)
    nz = tab.sigma > 0
    assert np.max(np.abs(tab.n_fn[nz] / (0.2 * tab.sigma[nz]) - 1)) < 1e-12


def test_simpson_order():
    a = 0.2
    errs = []
    for dt in (0.4, 0.2, 0.1):
        tab = build_table(homogeneous(0.3, 0.1, t_end=40.0, dt=dt))
        errs.append(np.max(np.abs(tab.sigma - (-np.expm1(-a * tab.grid) / a))))
    assert errs[0] / errs[1] >= 8 and errs[1] / errs[2] >= 8


def test_interp(running):
    assert interp(running, "s", 0.0) == 0.0
    assert interp(running, "s", 50.0) == pytest.approx(10.0, abs=1e-12)
    i = 1234
    assert interp(running, "l", running.grid[i]) == running.l_fn[i]
    with pytest.raises(RangeError):
        interp(running, "s", 500.1)
    with pytest.raises(RangeError):
        interp(running, "s", -0.1)
    with pytest.raises(ValueError):
        running.column("q")


def test_grid_contains_joins_and_days():
    tab = build_table(running_example(7.3, t_end=80.0, dt=0.03))
    for node in (50.0, 57.3, *range(81)):
        assert tab.index_of(float(node)) >= 0
    with pytest.raises(RangeError):
        tab.index_of(0.005)


def test_grid_overflow():
    with pytest.raises(ConfigError):
        make_grid(1e8, 1.0)


def test_large_s_warns_and_flags_clamp():
    sc = homogeneous(2.0, 0.0, t_end=400.0, dt=0.5)
    with pytest.warns(RuntimeWarning):
        tab = build_table(sc)
    assert tab.clamped
    assert np.all(np.isfinite(tab.sigma))


def test_table_is_read_only(running):
    with pytest.raises(ValueError):
        running.s[3] = 1.0


def test_s_is_exact_at_nodes(running):
    sc = running.scenario
    for t in (3.7, 50.0, 55.5, 250.0):
        i = int(np.argmin(np.abs(running.grid - t)))
        tt = running.grid[i]
        assert running.s[i] == pytest.approx(sc.lam.integrate(0, tt) - sc.mu.integrate(0, tt), abs=1e-13)
    assert math.isclose(running.t_max, 500.0)
