import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhbdi.exceptions import ConfigError, DomainError, UndefinedReproductionError
from nhbdi.rates import Constant, RaisedCosine, RateFunction, Segment
from nhbdi.scenario import effective_reproduction, homogeneous, mean_infectious_period, running_example

LAM = RateFunction.step(0.3, 0.06, 50.0, 10.0)


def test_eval_running_example():
    assert LAM(25.0) == 0.3
    assert LAM(60.0) == pytest.approx(0.06, abs=1e-15)
    assert LAM(55.0) == pytest.approx(0.18, abs=1e-15)
    assert LAM(50.0) == pytest.approx(0.3, abs=1e-15)


def test_eval_vectorized_matches_scalar():
    t = np.array([0.0, 12.5, 50.0, 52.0, 57.0, 60.0, 300.0])
    assert np.allclose(LAM(t), [LAM(float(x)) for x in t], rtol=0, atol=0)


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        LAM(-1.0)
    with pytest.raises(DomainError):
        LAM.integrate(-1.0, 2.0)


def test_integrals():
    assert LAM.integrate(0.0, 50.0) == pytest.approx(15.0, abs=1e-12)
    assert LAM.integrate(50.0, 60.0) == pytest.approx(1.8, abs=1e-12)
    mu = RateFunction.constant(0.1)
    assert LAM.integrate(0, 50) - mu.integrate(0, 50) == pytest.approx(10.0, abs=1e-12)


def test_integrate_reversed_interval_is_error():
    with pytest.raises(DomainError):
        LAM.integrate(5.0, 2.0)


def test_sup_inf():
    assert LAM.sup_on(0, 100) == 0.3
    assert LAM.sup_on(60, 100) == pytest.approx(0.06)
    assert LAM.sup_on(50, 60) == pytest.approx(0.3)
    assert LAM.inf_on(50, 60) == pytest.approx(0.06)
    assert LAM.sup_on(55, 57) == pytest.approx(LAM(55.0))


def test_step_without_delay_is_a_jump():
    r = RateFunction.step(0.3, 0.06, 50.0, 0.0)
    assert len(r.segments) == 2
    assert r(49.999) == 0.3 and r(50.0) == 0.06


def test_continuity_at_joins():
    for t1 in (50.0, 60.0):
        assert abs(LAM(t1 - 1e-9) - LAM(t1 + 1e-9)) < 1e-6


def test_with_delay_rewrites_transition():
    r = LAM.with_delay(5.0)
    assert r.joins == (50.0, 55.0)
    assert r(52.5) == pytest.approx(0.18)
    assert RateFunction.step(0.3, 0.06, 50.0).with_delay(10.0) == LAM
    with pytest.raises(ConfigError):
        RateFunction.constant(0.1).with_delay(3.0)


@pytest.mark.parametrize(
    "segments",
    [
        (),
        (Segment(1.0, math.inf, Constant(0.1)),),
        (Segment(0.0, 5.0, Constant(0.1)),),
        (Segment(0.0, 5.0, Constant(0.1)), Segment(6.0, math.inf, Constant(0.1))),
        (Segment(0.0, 5.0, Constant(-0.1)), Segment(5.0, math.inf, Constant(0.1))),
        (Segment(0.0, 5.0, Constant(0.1)), Segment(5.0, 5.0, RaisedCosine(0.1, 0.2)),
         Segment(5.0, math.inf, Constant(0.2))),
        (Segment(0.0, math.inf, RaisedCosine(0.1, 0.2)),),
    ],
)
def test_malformed_rate_functions(segments):
    with pytest.raises(ConfigError):
        RateFunction(tuple(segments))


def test_reproduction_number():
    sc = running_example(10.0)
    assert effective_reproduction(sc, 0.0) == pytest.approx(3.0)
    assert effective_reproduction(sc, 100.0) == pytest.approx(0.6)
    assert effective_reproduction(homogeneous(0.2, 0.2), 3.0) == 1.0
    assert mean_infectious_period(sc, 7.0) == pytest.approx(10.0)
    with pytest.raises(UndefinedReproductionError):
        effective_reproduction(homogeneous(0.2, 0.0), 1.0)


# --- property tests over random decree-style curves

levels = st.floats(0.0, 2.0, allow_nan=False)


@st.composite
def rate_functions(draw):
    n = draw(st.integers(1, 4))
    cuts = sorted(draw(st.lists(st.floats(0.5, 80.0), min_size=n - 1, max_size=n - 1, unique=True)))
    cuts = [c for i, c in enumerate(cuts) if i == 0 or c - cuts[i - 1] > 1e-3]
    edges = [0.0, *cuts, math.inf]
    level = draw(levels)
    segs = []
    for a, b in zip(edges[:-1], edges[1:]):
        if math.isfinite(b) and draw(st.booleans()):
            new = draw(levels)
            segs.append(Segment(a, b, RaisedCosine(level, new)))
            level = new
        else:
            if segs and isinstance(segs[-1].shape, Constant):
                level = draw(levels)
            segs.append(Segment(a, b, Constant(level)))
    if not isinstance(segs[-1].shape, Constant):  # pragma: no cover - last edge is inf
        raise AssertionError
    return RateFunction(tuple(segs))


times = st.floats(0.0, 120.0, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(rate_functions(), times, times, times)
def test_integral_additivity(r, a, b, c):
    t0, t1, t2 = sorted((a, b, c))
    assert r.integrate(t0, t2) == pytest.approx(r.integrate(t0, t1) + r.integrate(t1, t2), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(rate_functions(), times, times)
def test_integral_bounded_by_sup_and_inf(r, a, b):
    t0, t1 = sorted((a, b))
    width = t1 - t0
    integral = r.integrate(t0, t1)
    assert integral <= r.sup_on(t0, t1) * width + 1e-12
    assert integral >= r.inf_on(t0, t1) * width - 1e-12


@settings(max_examples=100, deadline=None)
@given(rate_functions(), st.floats(0.01, 119.0))
def test_sup_dominates_samples(r, t0):
    t = np.linspace(t0, t0 + 1.0, 50)
    assert np.all(r(t) <= r.sup_on(t0, t0 + 1.0) + 1e-15)


def test_antiderivative_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-4
    for t in rng.uniform(h, 100.0, 100):
        if any(abs(t - j) < 2 * h for j in LAM.joins):
            continue
        fd = (LAM.antiderivative(t + h) - LAM.antiderivative(t - h)) / (2 * h)
        assert fd == pytest.approx(LAM(t), abs=1e-6)
