"""Gridded central functions s, Sigma, N, L and M.

``s(t) = int_0^t (lambda - mu)`` is evaluated in closed form at every point.  The
four exponentially weighted integrals

    Sigma(t) = int e^{-s},  N(t) = int nu e^{-s},  L(t) = int lambda e^{-s},
    M(t) = int mu e^{-s}

are accumulated panel by panel with Simpson's rule, using the exact ``s`` at both
panel ends and at the midpoint.  Segment joins and integer days are always grid
nodes, so no panel straddles a discontinuity of a rate and daily differences
need no interpolation.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, RangeError
from .scenario import MAX_GRID_STEPS, Scenario

__all__ = ["IntegralTable", "build_table", "interp", "make_grid", "panel_simpson"]

# |s| beyond which e^{-s} starts to leave comfortable double range
S_WARN = 50.0
EXP_CLAMP = 700.0


@dataclass(frozen=True, eq=False)
class IntegralTable:
    scenario: Scenario
    grid: np.ndarray
    s: np.ndarray
    sigma: np.ndarray
    n_fn: np.ndarray
    l_fn: np.ndarray
    m_fn: np.ndarray
    # panel midpoints, used by the expected-value quadratures downstream
    mid: np.ndarray
    s_mid: np.ndarray
    n_mid: np.ndarray
    clamped: bool = False

    def column(self, which: str) -> np.ndarray:
        try:
            return {"s": self.s, "sigma": self.sigma, "n": self.n_fn, "l": self.l_fn, "m": self.m_fn}[which]
        except KeyError:
            raise ValueError(f"unknown column {which!r}; expected s|sigma|n|l|m") from None

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    def index_of(self, t: float) -> int:
        """Index of the node equal to ``t``; RangeError if ``t`` is not a node."""
        i = int(np.searchsorted(self.grid, t))
        if i < len(self.grid) and self.grid[i] == t:
            return i
        raise RangeError(f"t={t} is not a grid node")


def make_grid(t_end: float, dt: float, forced=()) -> np.ndarray:
    """Uniform nodes ``i*dt`` on ``[0, t_end]`` merged with ``forced`` nodes.

    Uniform nodes closer than ``1e-6*dt`` to a forced node are dropped in favour
    of the forced value.
    """
    n = int(math.ceil(t_end / dt - 1e-9))
    if n > MAX_GRID_STEPS:
        raise ConfigError(f"grid overflow: {n} steps > 1e7")
    base = np.arange(n + 1) * dt
    base[-1] = t_end
    forced = np.array(sorted({float(f) for f in forced if 0.0 < f < t_end} | {0.0, float(t_end)}))
    pos = np.searchsorted(forced, base)
    near = np.zeros(base.shape, dtype=bool)
    tol = 1e-6 * dt
    for off in (0, 1):
        j = np.clip(pos - off, 0, len(forced) - 1)
        near |= np.abs(base - forced[j]) <= tol
    return np.union1d(base[~near], forced)


def _exp(x: np.ndarray) -> tuple[np.ndarray, bool]:
    clipped = np.clip(x, -EXP_CLAMP, EXP_CLAMP)
    return np.exp(clipped), bool(np.any(clipped != x))


def panel_simpson(f_left, f_mid, f_right, width):
    return width / 6.0 * (f_left + 4.0 * f_mid + f_right)


def _panel_segments(rate, left, right):
    """Segment index of each panel, from its midpoint."""
    return rate.segment_index(0.5 * (left + right))


def build_table(sc: Scenario, extra_nodes=()) -> IntegralTable:
    """Tabulate s, Sigma, N, L, M on the scenario grid over ``[0, sc.t_end]``."""
    forced = set(extra_nodes)
    for rate in (sc.lam, sc.mu, sc.nu):
        forced.update(rate.joins)
    forced.update(range(1, int(math.floor(sc.t_end)) + 1))
    grid = make_grid(sc.t_end, sc.dt, forced)

    def s_at(t):
        return sc.lam.antiderivative(t) - sc.mu.antiderivative(t)

    left, right = grid[:-1], grid[1:]
    width = right - left
    mid = 0.5 * (left + right)
    s = s_at(grid)
    s_mid = s_at(mid)
    s_q = s_at(0.5 * (left + mid))

    if np.max(np.abs(s)) > S_WARN or np.max(np.abs(s_mid)) > S_WARN:
        warnings.warn(
            f"|s(t)| reaches {np.max(np.abs(s)):.1f} > {S_WARN}: exponentials are near the "
            "edge of double precision",
            RuntimeWarning,
            stacklevel=2,
        )
    w, c1 = _exp(-s)
    w_mid, c2 = _exp(-s_mid)
    w_q, c3 = _exp(-s_q)

    def accumulate(rate):
        if rate is None:
            f_l, f_m, f_r = w[:-1], w_mid, w[1:]
        else:
            seg = _panel_segments(rate, left, right)
            f_l = rate.eval(left, seg) * w[:-1]
            f_m = rate.eval(mid, seg) * w_mid
            f_r = rate.eval(right, seg) * w[1:]
        out = np.empty(grid.shape)
        out[0] = 0.0
        np.cumsum(panel_simpson(f_l, f_m, f_r, width), out=out[1:])
        return out

    sigma = accumulate(None)
    n_fn = accumulate(sc.nu)
    l_fn = accumulate(sc.lam)
    m_fn = accumulate(sc.mu)

    # N at panel midpoints: half-panel Simpson from the left node
    seg = _panel_segments(sc.nu, left, right)
    quarter = 0.5 * (left + mid)
    n_mid = n_fn[:-1] + panel_simpson(
        sc.nu.eval(left, seg) * w[:-1],
        sc.nu.eval(quarter, seg) * w_q,
        sc.nu.eval(mid, seg) * w_mid,
        0.5 * width,
    )

    arrays = [grid, s, sigma, n_fn, l_fn, m_fn, mid, s_mid, n_mid]
    for a in arrays:
        a.setflags(write=False)
    return IntegralTable(sc, *arrays, clamped=c1 or c2 or c3)


def interp(tab: IntegralTable, which: str, t):
    """Piecewise-linear interpolation of a tabulated function; exact at nodes."""
    values = tab.column(which)
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or np.any(arr > tab.grid[-1]):
        raise RangeError(f"t outside the table range [0, {tab.grid[-1]}]; extend the table")
    out = np.interp(arr, tab.grid, values)
    return out if out.ndim else float(out)
