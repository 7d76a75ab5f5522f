"""The acceptance suite: twelve numbered checks with pass/fail and timing.

Each check builds its own scenario, computes the quantity under test and an
independent reference, and returns a :class:`CheckResult`.  The Monte Carlo
checks take a ``reps`` argument so they can be run at reduced scale; their
tolerances are never rescaled.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .calculus import build_table, interp
from .deterministic import deterministic_series, expected_infected
from .oracle import branching_solve, extinction_probability, forward_solve
from .pmf import alpha_beta, pmf
from .scenario import homogeneous, running_example
from .simulator import empirical_pmf_distance, run_ensemble

__all__ = ["CheckResult", "CHECKS", "run_checks", "format_table"]


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    time_limit: float | None = None
    values: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.elapsed:.2f}s" + (f" (limit {self.time_limit:g}s)" if self.time_limit else "")
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} [{timing}]"


def _timed(number, title, limit=None):
    def wrap(fn):
        def run(**kw):
            t0 = time.perf_counter()
            passed, detail, values = fn(**kw)
            elapsed = time.perf_counter() - t0
            if limit is not None and elapsed > limit:
                passed = False
                detail += f"; too slow ({elapsed:.2f}s > {limit}s)"
            return CheckResult(number, title, bool(passed), detail, elapsed, limit, values)

        run.number = number
        run.title = title
        run.monte_carlo = False
        return run

    return wrap


@_timed(1, "L - M = 1 - exp(-s)", limit=1.0)
def check_identity():
    tab = build_table(running_example(10.0, t_end=500.0, dt=0.01))
    resid = float(np.max(np.abs(tab.l_fn - tab.m_fn - (1.0 - np.exp(-tab.s)))))
    return resid < 1e-8, f"max residual {resid:.2e} < 1e-8", {"residual": resid}


@_timed(2, "homogeneous closed forms", limit=1.0)
def check_homogeneous():
    lam, mu, nu, i0 = 0.3, 0.1, 0.2, 1
    a = lam - mu
    tab = build_table(homogeneous(lam, mu, nu, i0=i0, t_end=40.0, dt=0.01))
    t = tab.grid
    sigma = -np.expm1(-a * t) / a
    ref = {
        "sigma": (tab.sigma, sigma),
        "l": (tab.l_fn, lam * sigma),
        "m": (tab.m_fn, mu * sigma),
        "i_bar": (expected_infected(tab, i0), i0 * np.exp(a * t) + nu / a * np.expm1(a * t)),
    }
    worst = {}
    for name, (got, want) in ref.items():
        nz = want != 0
        rel = np.abs(got[nz] - want[nz]) / np.abs(want[nz])
        worst[name] = float(rel.max())
        if np.any(got[~nz] != 0):
            worst[name] = math.inf
    top = max(worst.values())
    return top < 1e-8, "max relative error " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()), worst


@_timed(3, "I = I0 + A + B - R", limit=1.0)
def check_consistency():
    worst = {}
    for nu0, i0 in [(0.0, 1), (0.2, 0), (0.2, 1)]:
        tab = build_table(running_example(10.0, nu0=nu0, i0=i0))
        worst[(nu0, i0)] = float(deterministic_series(tab).residual().max())
    top = max(worst.values())
    return top < 1e-6, f"max relative residual {top:.2e} < 1e-6 over (nu, I0) in {list(worst)}", {"residual": top}


@_timed(4, "s(50) = 10 and decay horizon")
def check_growth_landmarks():
    sc = running_example(0.0)
    s = lambda t: float(sc.lam.antiderivative(t) - sc.mu.antiderivative(t))  # noqa: E731
    s50 = s(50.0)
    root = brentq(s, 60.0, 1000.0, xtol=1e-12)
    ok = abs(s50 - 10.0) <= 1e-10 and abs(root - 300.0) <= 2.0
    return ok, f"s(50) = {s50:.12f}, s returns to 0 at t = {root:.4f}", {"s50": s50, "root": root}


@_timed(5, "alpha/beta trajectory")
def check_alpha_beta():
    tab = build_table(running_example(10.0))
    sel = (tab.grid >= 25) & (tab.grid <= 150)
    alpha = tab.m_fn / (1.0 + tab.m_fn)
    dev = float(np.max(np.abs(alpha[sel] - 1.0 / 3.0)))
    ab = alpha_beta(tab, 500.0)
    ok = dev < 0.01 and abs(ab.beta - 0.6) < 0.01 and ab.alpha > 0.99
    return ok, f"max |alpha - 1/3| on [25,150] = {dev:.4f}, beta(500) = {ab.beta:.5f}, alpha(500) = {ab.alpha:.5f}", {
        "plateau_dev": dev, "beta500": ab.beta, "alpha500": ab.alpha}


@_timed(6, "CV plateau")
def check_cv():
    tab = build_table(running_example(10.0))
    cv = np.sqrt(tab.l_fn + tab.m_fn)
    sel = (tab.grid >= 25) & (tab.grid <= 150)
    lo, hi = float(cv[sel].min()), float(cv[sel].max())
    late = cv[tab.grid > 250]
    rising = bool(np.all(np.diff(late) > 0))
    ok = lo >= 1.374 and hi <= 1.454 and rising
    return ok, f"cv on [25,150] in [{lo:.4f}, {hi:.4f}], increasing after 250: {rising}", {"lo": lo, "hi": hi}


@_timed(7, "PMF vs forward equations", limit=30.0)
def check_pmf_oracle():
    sc = running_example(10.0, t_end=8.0)
    tab = build_table(sc)
    p = pmf(tab, 8.0, 1, 400)
    q = forward_solve(sc, 8.0, 400)
    err = float(np.max(np.abs(p.p - q.q)))
    ok = err < 1e-5 and q.leaked < 1e-8
    return ok, f"max |P_k - q_k| = {err:.2e}, leaked {q.leaked:.1e}", {"err": err, "leaked": q.leaked}


@_timed(8, "pure death binomial")
def check_pure_death():
    sc = homogeneous(0.0, 0.1, 0.0, i0=5, t_end=10.0)
    p = pmf(build_table(sc), 10.0, 5, 5).p
    s = math.exp(-1.0)
    ref = np.array([math.comb(5, k) * s**k * (1 - s) ** (5 - k) for k in range(6)])
    err = float(np.max(np.abs(p - ref)))
    return err < 1e-10, f"max deviation from Binomial(5, 1/e) = {err:.1e}", {"err": err}


def _binomial_band(p, n):
    return 3.0 * math.sqrt(max(p * (1 - p), 0.0) / n)


@_timed(9, "Monte Carlo goodness of fit", limit=60.0)
def check_mc_fit(reps=100_000):
    sc = homogeneous(0.12, 0.1, 0.0, i0=1, t_end=20.0)
    tab = build_table(sc)
    ens = run_ensemble(sc, [20.0], replications=reps, keep_daily=False)
    ref = pmf(tab, 20.0, 1, 400)
    tv = empirical_pmf_distance(ens, ref)
    alpha = ref.p[0]
    frac = ens.extinction_fraction(20.0)
    band = _binomial_band(alpha, reps)
    ok = tv < 0.01 and abs(frac - alpha) <= band
    return ok, (f"TV = {tv:.4f} < 0.01; extinct {frac:.4f} vs alpha(20) {alpha:.4f} "
                f"(3 sigma {band:.4f}); {reps} paths"), {"tv": tv, "frac": frac, "alpha": alpha}


check_mc_fit.monte_carlo = True


def _median_consistent(cdf, m_hat, n):
    """Empirical median ``m_hat`` lies inside the 3-sigma band of the reference median."""
    band = 3.0 * math.sqrt(0.25 / n)
    below = cdf[m_hat - 1] if m_hat > 0 else 0.0
    return below <= 0.5 + band and cdf[m_hat] >= 0.5 - band


def _reference_cdf(tab, t, start=1024):
    K = start
    while True:
        dist = branching_solve(tab, t, K)
        if dist.cdf()[-1] >= 0.6:
            return dist
        K *= 2


@_timed(10, "BDI simulation vs oracles")
def check_bdi(reps=100_000):
    sc = running_example(10.0, nu0=0.2, i0=1)
    tab = build_table(sc)
    times = [8.0, 50.0, 150.0, 300.0]
    ens = run_ensemble(sc, times, replications=reps, keep_daily=False)
    values = {}
    ok = True
    parts = []

    p0 = extinction_probability(tab, 500.0)
    frac = ens.extinction_fraction()
    band = _binomial_band(p0, reps)
    good = abs(frac - p0) <= band
    ok &= good
    parts.append(f"P(I(500)=0) {frac:.4f} vs {p0:.4f} +- {band:.4f}")
    values["p0"] = (frac, p0)

    for t in times[1:]:
        ref = _reference_cdf(tab, t)
        x = ens.states_at(t)
        m_hat = int(np.sort(x)[(len(x) - 1) // 2])
        cdf = ref.cdf()
        good = m_hat < len(cdf) and _median_consistent(cdf, m_hat, reps)
        ok &= good
        parts.append(f"median I({t:g}) {m_hat} vs {ref.quantile(0.5)}")
        values[f"median{t:g}"] = (m_hat, ref.quantile(0.5))

    q8 = forward_solve(sc.with_overrides(t_end=8.0), 8.0, 600)
    tv = empirical_pmf_distance(ens, q8)
    ok &= tv < 0.015
    parts.append(f"TV at t=8 {tv:.4f} < 0.015")
    values["tv8"] = tv
    return ok, "; ".join(parts) + f"; {reps} paths", values


check_bdi.monte_carlo = True


@_timed(11, "peak timing")
def check_peak():
    out = {}
    for d in (10.0, 0.0):
        sc = running_example(d)
        tab = build_table(sc)
        i_bar = expected_infected(tab, 1)
        out[d] = float(tab.grid[int(np.argmax(i_bar))])
    # root of a(t) = 0 inside the transition: 0.18 + 0.12 cos(pi (t - 50)/10) = 0.1
    target = 50.0 + 10.0 / math.pi * math.acos(-2.0 / 3.0)
    ok = abs(out[10.0] - target) <= 2 * 0.01 and out[0.0] == 50.0
    return ok, f"argmax d=10 at {out[10.0]:.2f} (root {target:.4f}), d=0 at {out[0.0]:g}", {
        "d10": out[10.0], "d0": out[0.0], "root": target}


@_timed(12, "extinction limit")
def check_extinction():
    tab = build_table(running_example(10.0))
    p0 = tab.m_fn / (1.0 + tab.m_fn)
    late = p0[tab.grid > 60]
    mono = bool(np.all(np.diff(late) >= 0))
    final = float(p0[-1])
    return mono and final > 0.99, f"P_0 nondecreasing after 60: {mono}; P_0(500) = {final:.5f}", {"p500": final}


CHECKS = [
    check_identity, check_homogeneous, check_consistency, check_growth_landmarks,
    check_alpha_beta, check_cv, check_pmf_oracle, check_pure_death, check_mc_fit,
    check_bdi, check_peak, check_extinction,
]


def run_checks(numbers=None, reps: int | None = None, echo=None) -> list[CheckResult]:
    """Run the selected checks (all by default); ``reps`` rescales the Monte Carlo ones."""
    results = []
    for check in CHECKS:
        if numbers is not None and check.number not in numbers:
            continue
        kw = {"reps": reps} if (reps is not None and check.monte_carlo) else {}
        res = check(**kw)
        if echo:
            echo(res.line)
        results.append(res)
    return results


def format_table(results) -> str:
    lines = [r.line for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
