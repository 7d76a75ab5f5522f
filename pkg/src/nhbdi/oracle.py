"""Independent ground truth for the birth-death-immigration chain.

:func:`forward_solve` integrates the Kolmogorov forward equations on a truncated
state space ``0..K``.  From state ``k`` the chain moves up at rate
``k lambda(t) + nu(t)`` and down at rate ``k mu(t)``; mass pushed above ``K`` is
absorbed into ``leaked`` so undersized truncations are visible.

:func:`branching_solve` covers horizons where the state space is far too large
for the forward equations (epidemic peaks of ~1e5).  It uses the branching
property instead: every initial case and every immigrant founds an independent
birth-death lineage, immigrants arrive as a Poisson process, so the population is
the initial-lineage count plus a compound Poisson sum of lineage sizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np
from scipy.integrate import simpson

from .calculus import IntegralTable
from .exceptions import TruncationError
from .pmf import _ab_from, _pmf_from_ab
from .scenario import Scenario

__all__ = [
    "TruncatedDistribution",
    "forward_solve",
    "branching_solve",
    "extinction_probability",
    "LEAK_LIMIT",
]

LEAK_LIMIT = 1e-4


@dataclass(frozen=True, eq=False)
class TruncatedDistribution:
    t: float
    q: np.ndarray
    leaked: float

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.q)), self.q))

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.q)

    def quantile(self, prob: float) -> int:
        """Smallest ``k`` with ``P(X <= k) >= prob``."""
        c = self.cdf()
        k = int(np.searchsorted(c, prob))
        if k >= len(c):
            raise TruncationError(f"truncation holds only {c[-1]:.6f} < {prob} of the mass")
        return k


@nb.njit(cache=True)
def _rk4(q, leak, lam, mu, nu, h):
    """Fixed-step RK4; ``lam/mu/nu`` hold rates at t, t+h/2, t+h for every step."""
    K = q.shape[0] - 1
    n_steps = lam.shape[0]
    k1 = np.empty(K + 2)
    k2 = np.empty(K + 2)
    k3 = np.empty(K + 2)
    k4 = np.empty(K + 2)
    tmp = np.empty(K + 2)
    y = np.empty(K + 2)
    y[: K + 1] = q
    y[K + 1] = leak

    def deriv(x, l, m, v, out):
        for k in range(K + 1):
            up = k * l + v
            down = k * m
            acc = -(up + down) * x[k]
            if k > 0:
                acc += ((k - 1) * l + v) * x[k - 1]
            if k < K:
                acc += (k + 1) * m * x[k + 1]
            out[k] = acc
        out[K + 1] = (K * l + v) * x[K]

    for i in range(n_steps):
        deriv(y, lam[i, 0], mu[i, 0], nu[i, 0], k1)
        for j in range(K + 2):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        deriv(tmp, lam[i, 1], mu[i, 1], nu[i, 1], k2)
        for j in range(K + 2):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        deriv(tmp, lam[i, 1], mu[i, 1], nu[i, 1], k3)
        for j in range(K + 2):
            tmp[j] = y[j] + h * k3[j]
        deriv(tmp, lam[i, 2], mu[i, 2], nu[i, 2], k4)
        for j in range(K + 2):
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
    return y


def _stage_rates(rate, t0, h, n):
    start = t0 + h * np.arange(n)
    stages = np.stack([start, start + 0.5 * h, start + h], axis=1)
    # one-sided values: each step uses the segment of its midpoint
    seg = rate.segment_index(start + 0.5 * h)
    seg = np.repeat(seg[:, None], 3, axis=1)
    return np.ascontiguousarray(rate.eval(stages, seg))


def forward_solve(sc: Scenario, t_target: float, K_trunc: int, step_factor: float = 1.0) -> TruncatedDistribution:
    """Distribution of ``I(t_target)`` from ``I(0) = sc.i0`` on states ``0..K_trunc``.

    The step obeys ``h <= 0.1 / (K (sup lambda + sup mu) + sup nu)``; ``step_factor``
    shrinks it further (convergence checks).
    """
    if K_trunc < sc.i0:
        raise TruncationError(f"K_trunc={K_trunc} below the initial state {sc.i0}")
    q = np.zeros(K_trunc + 1)
    q[sc.i0] = 1.0
    if t_target == 0:
        return TruncatedDistribution(0.0, q, 0.0)
    bound = K_trunc * (sc.lam.sup_on(0, t_target) + sc.mu.sup_on(0, t_target)) + sc.nu.sup_on(0, t_target)
    h_max = 0.1 / bound if bound > 0 else t_target
    h_max *= step_factor
    n = max(1, int(math.ceil(t_target / h_max)))
    h = t_target / n
    # steps are chunked so that no step straddles a rate join
    joins = sorted({j for r in (sc.lam, sc.mu, sc.nu) for j in r.joins if 0 < j < t_target})
    edges = [0.0, *joins, float(t_target)]
    leak = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        m = max(1, int(math.ceil((b - a) / h)))
        hh = (b - a) / m
        y = _rk4(q, leak, _stage_rates(sc.lam, a, hh, m), _stage_rates(sc.mu, a, hh, m), _stage_rates(sc.nu, a, hh, m), hh)
        q, leak = y[:-1].copy(), float(y[-1])
    if np.any(q < -1e-12):
        raise TruncationError("negative probabilities: step too large for this truncation")
    q = np.maximum(q, 0.0)
    if leak > LEAK_LIMIT:
        raise TruncationError(f"leaked mass {leak:.3g} > {LEAK_LIMIT}; increase K_trunc")
    return TruncatedDistribution(float(t_target), q, leak)


# ---------------------------------------------------------------------------
# branching decomposition


def _lineage_params(tab: IntegralTable, t: float):
    """Per arrival time ``u <= t``: nodes, weights nu(u), survival 1-alpha_u, beta_u, 1-beta_u."""
    i = tab.index_of(t)
    u = tab.grid[: i + 1]
    s_u = tab.s[: i + 1]
    s_t = tab.s[i]
    scale = np.exp(s_u)
    L_ut = scale * (tab.l_fn[i] - tab.l_fn[: i + 1])
    M_ut = scale * (tab.m_fn[i] - tab.m_fn[: i + 1])
    survive = 1.0 / (1.0 + M_ut)
    # 1 + M_ut - L_ut = e^{s(u) - s(t)}
    one_b = np.exp(s_u - s_t) * survive
    beta = 1.0 - one_b
    nu = tab.scenario.nu.eval(u)
    return u, nu, survive, beta, one_b


def extinction_probability(tab: IntegralTable, t: float) -> float:
    """``P(I(t) = 0)`` including immigration: initial lineages extinct, no surviving immigrant lineage."""
    i = tab.index_of(t)
    ab = _ab_from(t, tab.l_fn[i], tab.m_fn[i])
    u, nu, survive, _, _ = _lineage_params(tab, t)
    lam_surv = float(simpson(nu * survive, x=u)) if len(u) > 1 else 0.0
    return ab.alpha ** tab.scenario.i0 * math.exp(-lam_surv)


@nb.njit(cache=True)
def _panjer(rate, sev, K):
    """Compound Poisson pmf ``h_0..h_K``; ``sev[y]`` is the size law on y >= 1."""
    h = np.zeros(K + 1)
    h[0] = math.exp(-rate)
    ys = np.arange(K + 1) * sev[: K + 1]
    for k in range(1, K + 1):
        acc = 0.0
        for y in range(1, k + 1):
            acc += ys[y] * h[k - y]
        h[k] = rate / k * acc
    return h


def branching_solve(tab: IntegralTable, t: float, K: int, chunk: int = 512) -> TruncatedDistribution:
    """``P(I(t) = k)``, ``k <= K``, from the lineage decomposition (``t`` must be a grid node)."""
    sc = tab.scenario
    i = tab.index_of(t)
    ab = _ab_from(t, tab.l_fn[i], tab.m_fn[i])
    if sc.i0 > 0:
        base, _ = _pmf_from_ab(ab, sc.i0, K)
    else:
        base = np.zeros(K + 1)
        base[0] = 1.0
    if sc.nu.is_zero or t == 0:
        return TruncatedDistribution(float(t), base, max(0.0, 1.0 - math.fsum(base)))

    u, nu, survive, beta, one_b = _lineage_params(tab, t)
    dens = nu * survive
    lam_surv = float(simpson(dens, x=u))
    sev = np.zeros(K + 1)
    coef = dens * one_b
    log_beta = np.log(np.where(beta > 0, beta, 1.0))
    zero_beta = beta <= 0
    for start in range(1, K + 1, chunk):
        ys = np.arange(start, min(K + 1, start + chunk))
        powers = np.exp(np.outer(ys - 1, log_beta))
        powers[:, zero_beta] = (ys[:, None] == 1).astype(float)
        sev[ys] = simpson(powers * coef, x=u, axis=1)
    sev /= lam_surv
    h = _panjer(lam_surv, sev, K)
    q = np.convolve(base, h)[: K + 1]
    return TruncatedDistribution(float(t), q, max(0.0, 1.0 - math.fsum(q)))
