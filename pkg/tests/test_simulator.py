import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhbdi.calculus import build_table
from nhbdi.deterministic import deterministic_series
from nhbdi.exceptions import SimulationError
from nhbdi.oracle import forward_solve
from nhbdi.pmf import pmf
from nhbdi.rates import RateFunction
from nhbdi.scenario import Scenario, homogeneous, running_example
from nhbdi.simulator import (
    EventKind,
    derive_path_seed,
    empirical_pmf_distance,
    run_ensemble,
    simulate_path,
)

N = 100_000


def three_sigma(p, n):
    return 3 * math.sqrt(p * (1 - p) / n)


def test_empty_system_has_no_events():
    sc = homogeneous(0.3, 0.1, 0.0, i0=0, t_end=50.0)
    log = simulate_path(sc, 1)
    assert len(log) == 0 and log.final_state == 0
    assert log.extinction_time == 0.0


def test_extinction_time_exponential():
    sc = homogeneous(0.0, 0.1, 0.0, i0=1, t_end=400.0)
    ens = run_ensemble(sc, replications=N, keep_daily=False)
    t = ens.extinction_times
    assert np.all(np.isfinite(t))
    assert abs(t.mean() - 10.0) < 0.1
    assert np.all(ens.events == 1)


def test_path_invariants():
    sc = running_example(10.0, nu0=0.2, t_end=70.0)
    for i in range(5):
        log = simulate_path(sc, derive_path_seed(7, i))
        assert log.conserved()
        assert np.all(np.diff(log.times) > 0)
        assert log.times[0] > 0 and log.times[-1] <= 70.0
        counts = log.counts()
        assert log.final_state == 1 + counts["arrival"] + counts["birth"] - counts["death"]
        kinds = {kind for _, kind, _ in log.events()}
        assert kinds <= set(EventKind)


@st.composite
def small_scenarios(draw):
    lam = draw(st.floats(0.0, 0.6))
    return Scenario(
        RateFunction.step(lam, draw(st.floats(0.0, 0.6)), draw(st.floats(0.5, 8.0)),
                          draw(st.one_of(st.just(0.0), st.floats(0.5, 6.0)))),
        RateFunction.constant(draw(st.floats(0.0, 0.6))),
        RateFunction.step(draw(st.floats(0.0, 2.0)), draw(st.floats(0.0, 2.0)), 3.0, 2.0),
        i0=draw(st.integers(0, 5)), t_end=15.0, window=draw(st.floats(0.3, 6.0)),
    )


@settings(max_examples=60, deadline=None)
@given(small_scenarios(), st.integers(0, 2**64 - 1))
def test_pathwise_conservation(sc, seed):
    log = simulate_path(sc, seed, capacity=8)
    assert log.conserved()
    assert np.all(np.diff(log.times) > 0)
    if sc.nu.is_zero and log.final_state == 0 and len(log):
        assert log.times[-1] == log.extinction_time


def test_log_buffer_regrows_identically():
    sc = running_example(10.0, nu0=0.2, t_end=40.0)
    a = simulate_path(sc, 42, capacity=4)
    b = simulate_path(sc, 42, capacity=1 << 20)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)


def test_event_budget():
    sc = homogeneous(1.0, 0.0, 0.0, i0=5, t_end=50.0)
    with pytest.raises(SimulationError):
        simulate_path(sc, 3, max_events=1000)
    with pytest.raises(SimulationError):
        run_ensemble(sc, replications=2, max_events=1000)


def test_replay_and_determinism():
    sc = running_example(10.0, nu0=0.2, t_end=30.0)
    times = [0.0, 8.0, 20.0, 30.0]
    a = run_ensemble(sc, times, replications=300, threads=1)
    b = run_ensemble(sc, times, replications=300, threads=4)
    for field in ("snapshots", "final_states", "extinction_times", "events", "daily_infections", "daily_recoveries"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
    c = run_ensemble(sc, times, replications=500, threads=2)
    assert np.array_equal(c.snapshots[:, :300], a.snapshots)
    for i in (0, 17, 299):
        log = simulate_path(sc, derive_path_seed(sc.master_seed, i))
        assert [log.state_at(t) for t in times] == list(a.snapshots[:, i])
        assert log.final_state == a.final_states[i]
        days = np.ceil(log.times[log.kinds == EventKind.DEATH]).astype(int)
        assert np.array_equal(np.bincount(days, minlength=31)[1:], a.daily_recoveries[i])


def test_summary_shapes():
    sc = running_example(10.0, i0=1, t_end=20.0)
    ens = run_ensemble(sc, [0.0, 10.0, 20.0], replications=400)
    assert ens.extinction_fraction(0.0) == 0.0
    for t in (0.0, 10.0, 20.0):
        assert ens.empirical_pmf(t).sum() == pytest.approx(1.0)
    st_ = ens.daily_stats("infections")
    assert np.all(st_["q05"] <= st_["q50"]) and np.all(st_["q50"] <= st_["q95"])
    assert len(st_["day"]) == 20
    with pytest.raises(ValueError):
        ens.states_at(5.0)
    lean = run_ensemble(sc, [10.0], replications=10, keep_daily=False)
    with pytest.raises(ValueError):
        lean.daily_stats()
    with pytest.raises(ValueError):
        run_ensemble(sc, [25.0], replications=2)


def test_distance_helpers():
    sc = homogeneous(0.12, 0.1, i0=1, t_end=20.0)
    tab = build_table(sc)
    ens = run_ensemble(sc, [20.0], replications=200)
    ref = pmf(tab, 20.0, 1, 50)
    assert 0 <= empirical_pmf_distance(ens, ref) <= 1
    with pytest.raises(ValueError):
        empirical_pmf_distance(ens, pmf(tab, 10.0, 1, 50))


def test_goodness_of_fit_and_negative_control():
    sc = homogeneous(0.12, 0.1, i0=1, t_end=20.0)
    tab = build_table(sc)
    ens = run_ensemble(sc, [20.0], replications=N, keep_daily=False)
    ref = pmf(tab, 20.0, 1, 400)
    assert empirical_pmf_distance(ens, ref) < 0.01
    assert abs(ens.extinction_fraction(20.0) - ref.p[0]) <= three_sigma(ref.p[0], N)
    wrong = pmf(build_table(homogeneous(0.12, 0.2, i0=1, t_end=20.0)), 20.0, 1, 400)
    exact_gap = 0.5 * (np.abs(ref.p - wrong.p).sum() + abs(ref.tail - wrong.tail))
    assert exact_gap > 0.05
    assert empirical_pmf_distance(ens, wrong) > 0.05


def test_bdi_matches_forward_equations():
    sc = running_example(10.0, nu0=0.2, t_end=8.0)
    ens = run_ensemble(sc, [8.0], replications=N, keep_daily=False)
    ref = forward_solve(sc, 8.0, 600)
    assert empirical_pmf_distance(ens, ref) < 0.015


def test_window_refinement():
    # decree early enough that the raised-cosine thinning is exercised
    sc = Scenario(RateFunction.step(0.3, 0.06, 4.0, 6.0), RateFunction.constant(0.1),
                  RateFunction.constant(0.2), i0=1, t_end=12.0)
    ref = forward_solve(sc, 12.0, 400)
    fracs = []
    for w, seed in ((5.0, 1), (2.5, 2)):
        ens = run_ensemble(sc.with_overrides(window=w, master_seed=seed), [12.0], replications=N, keep_daily=False)
        assert empirical_pmf_distance(ens, ref) < 0.015
        assert abs(ens.extinction_fraction() - ref.q[0]) <= three_sigma(ref.q[0], N)
        fracs.append(ens.extinction_fraction())
    assert abs(fracs[0] - fracs[1]) <= 3 * math.sqrt(2) * math.sqrt(ref.q[0] * (1 - ref.q[0]) / N)


def test_daily_recoveries_match_expectation():
    sc = homogeneous(0.12, 0.1, 0.2, i0=1, t_end=100.0)
    ens = run_ensemble(sc, replications=N)
    ser = deterministic_series(build_table(sc))
    rec = ens.daily_stats("recoveries")
    z = np.abs(rec["mean"] - ser.r_new) / rec["se"]
    inf = ens.daily_stats("infections")
    z_inf = np.abs(inf["mean"] - ser.i_new) / inf["se"]
    print(f"daily recoveries: max |z| = {z.max():.2f}, days beyond 3 SE: {int((z > 3).sum())}")
    print(f"daily infections: max |z| = {z_inf.max():.2f}, days beyond 3 SE: {int((z_inf > 3).sum())}")
    assert np.all(z < 3)
    assert np.all(z_inf < 3)


@pytest.mark.slow
def test_bd_extinction_by_horizon():
    sc = running_example(10.0, i0=1)
    alpha = pmf(build_table(sc), 500.0, 1, 10).p[0]
    ens = run_ensemble(sc, replications=N, keep_daily=False)
    frac = ens.extinction_fraction()
    print(f"extinct by 500: {frac:.5f} vs alpha(500) = {alpha:.5f}")
    assert abs(frac - alpha) <= three_sigma(alpha, N)
