"""Expected trajectories of the infection process and its counting processes.

I(t)  infectious population        A(t) cumulative external arrivals
B(t)  cumulative internal births   R(t) cumulative recoveries/removals

The expectations satisfy ``I = I0 + A + B - R``; the quadratures for B and R
are independent of the closed form for I, so that identity is a real check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .calculus import IntegralTable, _exp, _panel_segments, panel_simpson
from .exceptions import ApproximationError
from .rates import Constant

__all__ = [
    "DeterministicSeries",
    "Approximation",
    "expected_infected",
    "expected_cumulatives",
    "daily_counts",
    "deterministic_series",
    "approx_expected_infected",
    "consistency_residual",
]


@dataclass(frozen=True, eq=False)
class DeterministicSeries:
    grid: np.ndarray
    i_bar: np.ndarray
    a_bar: np.ndarray
    b_bar: np.ndarray
    r_bar: np.ndarray
    days: np.ndarray
    i_new: np.ndarray
    r_new: np.ndarray
    i0: int

    def residual(self) -> np.ndarray:
        return consistency_residual(self)


def expected_infected(tab: IntegralTable, i0: int) -> np.ndarray:
    """``I0 e^{s} + e^{s} N`` at every node."""
    growth, _ = _exp(tab.s)
    return growth * (i0 + tab.n_fn)


def expected_cumulatives(tab: IntegralTable, i0: int):
    """``(A, B, R)`` at every node: ``A = int nu``, ``B = int lambda I``, ``R = int mu I``.

    A is integrated exactly; B and R use panel Simpson with the expected
    infectious count evaluated at panel midpoints from the table.
    """
    sc = tab.scenario
    grid = tab.grid
    left, right = grid[:-1], grid[1:]
    width = right - left
    i_nodes = expected_infected(tab, i0)
    growth_mid, _ = _exp(tab.s_mid)
    i_mid = growth_mid * (i0 + tab.n_mid)

    def accumulate(rate):
        seg = _panel_segments(rate, left, right)
        inc = panel_simpson(
            rate.eval(left, seg) * i_nodes[:-1],
            rate.eval(tab.mid, seg) * i_mid,
            rate.eval(right, seg) * i_nodes[1:],
            width,
        )
        return np.concatenate([[0.0], np.cumsum(inc)])

    a_bar = sc.nu.antiderivative(grid)
    return a_bar, accumulate(sc.lam), accumulate(sc.mu)


def daily_counts(tab: IntegralTable, a_bar, b_bar, r_bar):
    """Expected new infections and recoveries on days ``1..floor(t_end)``.

    Day ``t`` is the interval ``(t-1, t]``; integer days are grid nodes.
    """
    n_days = int(math.floor(tab.t_max))
    days = np.arange(n_days + 1, dtype=float)
    idx = np.searchsorted(tab.grid, days)
    if np.any(tab.grid[idx] != days):  # pragma: no cover - build_table forces these nodes
        raise AssertionError("integer days missing from the grid")
    infected = (np.asarray(a_bar) + np.asarray(b_bar))[idx]
    recovered = np.asarray(r_bar)[idx]
    return np.arange(1, n_days + 1), np.diff(infected), np.diff(recovered)


def deterministic_series(tab: IntegralTable, i0: int | None = None) -> DeterministicSeries:
    i0 = tab.scenario.i0 if i0 is None else int(i0)
    i_bar = expected_infected(tab, i0)
    a_bar, b_bar, r_bar = expected_cumulatives(tab, i0)
    days, i_new, r_new = daily_counts(tab, a_bar, b_bar, r_bar)
    return DeterministicSeries(tab.grid, i_bar, a_bar, b_bar, r_bar, days, i_new, r_new, i0)


def consistency_residual(series: DeterministicSeries) -> np.ndarray:
    """Relative residual of ``I - (I0 + A + B - R)``, scaled by ``max(1, I)``."""
    rebuilt = series.i0 + series.a_bar + series.b_bar - series.r_bar
    return np.abs(series.i_bar - rebuilt) / np.maximum(1.0, series.i_bar)


@dataclass(frozen=True, eq=False)
class Approximation:
    grid: np.ndarray
    values: np.ndarray
    a0: float
    k0: float
    second_term_negligible: bool


def approx_expected_infected(tab: IntegralTable, i0: int | None = None) -> Approximation:
    """Closed-form approximation ``(I0 + k0) e^{s} - k0 e^{s - a0 t}`` with ``k0 = nu0/a0``.

    Requires constant rates on an initial window with ``a0 = lambda0 - mu0 > 0``.
    Dropping the second term needs ``s(t) <= a0 t``; that is checked and a
    warning issued when it fails.  Never fed into exact computations.
    """
    sc = tab.scenario
    i0 = sc.i0 if i0 is None else int(i0)
    first = [r.segments[0].shape for r in (sc.lam, sc.mu, sc.nu)]
    if not all(isinstance(s, Constant) for s in first):
        raise ApproximationError("rates must be constant on an initial window")
    lam0, mu0, nu0 = (s.level for s in first)
    a0 = lam0 - mu0
    if a0 <= 0:
        raise ApproximationError(f"initial growth rate a0 = {a0} must be positive")
    k0 = nu0 / a0
    t = tab.grid
    growth, _ = _exp(tab.s)
    damp, _ = _exp(tab.s - a0 * t)
    values = (i0 + k0) * growth - k0 * damp
    ok = bool(np.all(tab.s <= a0 * t + 1e-9 * np.maximum(1.0, a0 * t)))
    if not ok:
        warnings.warn("s(t) exceeds a0*t somewhere: the decaying term is not negligible", RuntimeWarning)
    return Approximation(t, values, a0, k0, ok)
