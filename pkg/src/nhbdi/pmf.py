"""Exact time-dependent distribution of the nonhomogeneous birth-death process.

With ``L`` and ``M`` from the integral table, the generating function is

    G(z, t) = ((M - (L - 1) z) / (1 + M - L z)) ** I0
            = ((alpha + (1 - alpha - beta) z) / (1 - beta z)) ** I0,

    alpha = M / (1 + M),   beta = L / (1 + M).

For one initial case the law is a zero-modified geometric.  For several, each
initial lineage independently is extinct with probability ``alpha`` or else
holds a geometric (``>= 1``, ratio ``beta``) number of cases, so

    P_k = sum_j C(I0, j) alpha^(I0-j) (1-alpha)^j  C(k-1, j-1) beta^(k-j) (1-beta)^j.

This regrouping of the binomial/negative-binomial double sum has only
nonnegative terms.  The ungrouped sum carries ``(1 - alpha - beta)^i``, which is
negative as soon as ``L > 1`` and cancels catastrophically near the epidemic
peak; it is kept as :func:`pmf_expanded` for cross-checks where it is
well conditioned.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .calculus import IntegralTable, interp
from .exceptions import ConfigError, TruncationError

__all__ = [
    "AlphaBeta",
    "PmfSlice",
    "Moments",
    "MeshGrid",
    "alpha_beta",
    "pmf",
    "pmf_expanded",
    "pgf_eval",
    "moments",
    "mesh",
    "default_k",
    "worker_count",
]


def worker_count() -> int:
    raw = os.environ.get("NHBDI_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"NHBDI_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


@dataclass(frozen=True)
class AlphaBeta:
    t: float
    alpha: float
    beta: float
    # 1 - beta from (1 + M - L)/(1 + M), avoiding the cancellation when beta ~ 1
    one_minus_beta: float

    @property
    def gamma(self) -> float:
        """``1 - alpha - beta``; negative whenever ``L(t) > 1``."""
        return 1.0 - self.alpha - self.beta


@dataclass(frozen=True, eq=False)
class PmfSlice:
    t: float
    i0: int
    p: np.ndarray
    tail: float
    ab: AlphaBeta | None = None

    @property
    def k_max(self) -> int:
        return len(self.p) - 1

    def mean(self, include_tail: bool = True) -> float:
        """``sum k p_k``; for one initial case the geometric tail is added in closed form."""
        k = np.arange(len(self.p))
        m = float(np.dot(k, self.p))
        if include_tail and self.i0 == 1 and self.tail > 0:
            ab = self.ab
            K = self.k_max
            # sum_{k>K} k (1-a)(1-b) b^{k-1} = (1-a) b^K (K + 1/(1-b))
            m += (1.0 - ab.alpha) * ab.beta**K * (K + 1.0 / ab.one_minus_beta)
        return m

    def variance(self) -> float:
        k = np.arange(len(self.p))
        mass = self.p.sum()
        mu = np.dot(k, self.p) / mass
        return float(np.dot((k - mu) ** 2, self.p) / mass)


@dataclass(frozen=True)
class Moments:
    t: float
    mean: float
    variance: float
    cv: float


@dataclass(frozen=True, eq=False)
class MeshGrid:
    times: np.ndarray
    ks: np.ndarray
    z: np.ndarray  # z[k_index, time_index]
    tail: np.ndarray  # per column, mass beyond the last full k

    def row(self, k: int) -> np.ndarray:
        """``P_k(t)`` over all mesh times."""
        idx = np.searchsorted(self.ks, k)
        if idx >= len(self.ks) or self.ks[idx] != k:
            raise KeyError(f"k={k} not on the mesh")
        return self.z[idx]

    def column(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.times - t)))
        if self.times[idx] != t:
            raise KeyError(f"t={t} not on the mesh")
        return self.z[:, idx]


def _require_bd(tab: IntegralTable):
    if not tab.scenario.nu.is_zero:
        raise ConfigError(
            "the closed-form PMF exists only without external arrivals (nu = 0); "
            "use the simulator or the forward-equation oracle instead"
        )


def alpha_beta(tab: IntegralTable, t: float) -> AlphaBeta:
    """``alpha = M/(1+M)`` (= P_0 for one initial case) and ``beta = L/(1+M)``."""
    L = interp(tab, "l", t)
    M = interp(tab, "m", t)
    return _ab_from(t, L, M)


def _ab_from(t, L, M) -> AlphaBeta:
    denom = 1.0 + M
    gap = denom - L  # equals e^{-s} > 0
    if gap <= 0:
        raise TruncationError(f"1 + M - L = {gap:.3g} <= 0 at t={t}: table lost precision")
    return AlphaBeta(float(t), M / denom, L / denom, gap / denom)


def alpha_via_sigma(tab: IntegralTable, t: float) -> float:
    """``alpha = 1 / (1 + 1/(mu Sigma))``, valid for constant mu only."""
    mu = tab.scenario.mu
    if not mu.is_constant:
        raise ConfigError("the Sigma form of alpha needs a constant recovery rate")
    sigma = interp(tab, "sigma", t)
    if sigma == 0:
        return 0.0
    return 1.0 / (1.0 + 1.0 / (mu.segments[0].shape.level * sigma))


def default_k(tab: IntegralTable, t: float, i0: int, eps: float = 1e-9) -> int:
    """Truncation with single-lineage geometric tail below ``eps``, scaled by ``i0``."""
    ab = alpha_beta(tab, t)
    if ab.beta <= 0:
        return max(i0, 1)
    k1 = math.log(eps / max(1.0 - ab.alpha, eps)) / math.log(ab.beta)
    return int(max(i0, math.ceil(max(k1, 1.0)) * max(i0, 1)))


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _pmf_from_ab(ab: AlphaBeta, i0: int, K: int) -> tuple[np.ndarray, float]:
    k = np.arange(K + 1, dtype=float)
    p = np.zeros(K + 1)
    alpha, beta = ab.alpha, ab.beta
    one_a = 1.0 - alpha
    one_b = ab.one_minus_beta
    if i0 == 1:
        p[0] = alpha
        if K >= 1:
            p[1:] = one_a * one_b * np.exp(xlogy(k[1:] - 1.0, beta))
        tail = one_a * float(np.exp(xlogy(K, beta)))
        return p, tail
    p[0] = math.exp(xlogy(i0, alpha))
    if K >= 1:
        kk = k[1:]
        total = np.zeros(K)
        for j in range(1, i0 + 1):
            valid = kk >= j
            if not np.any(valid):
                break
            kv = kk[valid]
            if one_a <= 0:
                break
            log_term = (
                _log_binom(i0, j)
                + xlogy(i0 - j, alpha)
                + j * math.log(one_a)
                + j * math.log(one_b)
                + _log_binom(kv - 1.0, j - 1.0)
                + xlogy(kv - j, beta)
            )
            total[valid] += np.exp(log_term)
        p[1:] = total
    tail = max(0.0, 1.0 - math.fsum(p))
    return p, tail


def pmf(tab: IntegralTable, t: float, i0: int | None = None, K: int | None = None) -> PmfSlice:
    """``P_k(t)`` for ``k = 0..K`` and the mass beyond ``K``."""
    _require_bd(tab)
    i0 = tab.scenario.i0 if i0 is None else int(i0)
    if K is None:
        K = default_k(tab, t, i0)
    if K < i0:
        raise TruncationError(f"K={K} must be >= I0={i0}")
    ab = alpha_beta(tab, t)
    if i0 == 0:
        p = np.zeros(K + 1)
        p[0] = 1.0
        return PmfSlice(float(t), 0, p, 0.0, ab)
    p, tail = _pmf_from_ab(ab, i0, K)
    return PmfSlice(float(t), i0, p, tail, ab)


def pmf_expanded(tab: IntegralTable, t: float, i0: int, K: int) -> np.ndarray:
    """The ungrouped double sum with signed ``(1 - alpha - beta)^i`` factors.

    Accurate only while ``1 - alpha - beta >= 0`` or ``I0`` is small; used to
    cross-check :func:`pmf`.
    """
    _require_bd(tab)
    ab = alpha_beta(tab, t)
    gamma = ab.gamma
    p = np.zeros(K + 1)
    p[0] = ab.alpha**i0
    k = np.arange(1, K + 1, dtype=float)
    for i in range(0, i0 + 1):
        valid = k >= i
        kv = k[valid]
        mag = (
            _log_binom(i0, i)
            + _log_binom(i0 + kv - i - 1.0, kv - i)
            + xlogy(i0 - i, ab.alpha)
            + xlogy(kv - i, ab.beta)
            + xlogy(i, abs(gamma))
        )
        sign = -1.0 if (gamma < 0 and i % 2 == 1) else 1.0
        p[1:][valid] += sign * np.exp(mag)
    return p


def pgf_eval(tab: IntegralTable, z: float, t: float, i0: int | None = None) -> float:
    """``G(z, t) = ((M - (L - 1) z) / (1 + M - L z))^I0`` for ``z`` in ``[0, 1]``."""
    i0 = tab.scenario.i0 if i0 is None else int(i0)
    if not 0.0 <= z <= 1.0:
        raise ValueError("pgf_eval is defined for real z in [0, 1]")
    L = interp(tab, "l", t)
    M = interp(tab, "m", t)
    # both terms share the gap 1 + M - L, so G(1) = 1 holds exactly
    gap = 1.0 + M - L
    w = 1.0 - z
    return ((gap + (L - 1.0) * w) / (gap + L * w)) ** i0


def moments(tab: IntegralTable, t: float, i0: int | None = None) -> Moments:
    """Mean ``I0 e^s``, variance ``I0 e^{2s} (L + M)`` and CV ``sqrt((L + M)/I0)``."""
    i0 = tab.scenario.i0 if i0 is None else int(i0)
    s = interp(tab, "s", t)
    L = interp(tab, "l", t)
    M = interp(tab, "m", t)
    mean = i0 * math.exp(s)
    var = i0 * math.exp(2.0 * s) * (L + M)
    cv = math.sqrt((L + M) / i0) if i0 > 0 else float("nan")
    return Moments(float(t), mean, var, cv)


def mesh(tab: IntegralTable, times, K: int, i0: int | None = None, k_stride: int = 1, threads: int | None = None) -> MeshGrid:
    """``z[k, i] = P_k(t_i)`` for ``k = 0, k_stride, ...`` up to ``K``; columns in parallel."""
    i0 = tab.scenario.i0 if i0 is None else int(i0)
    times = np.asarray(times, dtype=float)
    ks = np.arange(0, K + 1, k_stride)

    def column(t):
        sl = pmf(tab, t, i0, K)
        return sl.p[ks], sl.tail

    workers = threads or worker_count()
    if workers > 1 and len(times) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(column, times))
    else:
        cols = [column(t) for t in times]
    z = np.column_stack([c[0] for c in cols]) if cols else np.zeros((len(ks), 0))
    tail = np.array([c[1] for c in cols])
    return MeshGrid(times, ks, z, tail)
