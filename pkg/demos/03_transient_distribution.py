"""The time-dependent distribution of the birth-death case (no arrivals).

For one initial case the distribution is a zero-modified geometric with
parameters alpha (the extinction probability) and beta.  alpha rises quickly
to mu/lambda = 1/3, stays there through the peak and climbs toward 1 once the
epidemic is suppressed; beta tends to lambda1/mu = 0.6.
"""
from pathlib import Path

import numpy as np

from nhbdi import alpha_beta, build_table, mesh, moments, pmf, running_example
from nhbdi.svg import heatmap, line_plot

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

tab = build_table(running_example(10.0))
for t in (1.0, 10.0, 25.0, 57.0, 150.0, 250.0, 400.0, 500.0):
    ab = alpha_beta(tab, t)
    m = moments(tab, t)
    print(f"t = {t:5g}: alpha = {ab.alpha:.5f}, beta = {ab.beta:.6f}, mean = {m.mean:12.2f}, cv = {m.cv:8.4f}")

alpha = tab.m_fn / (1 + tab.m_fn)
beta = tab.l_fn / (1 + tab.m_fn)
line_plot(OUT / "alpha_beta.svg", [(tab.grid, alpha, "alpha"), (tab.grid, beta, "beta")], "alpha and beta")
line_plot(OUT / "cv.svg", [(tab.grid, np.sqrt(tab.l_fn + tab.m_fn), "c_I")], "coefficient of variation",
          ylabel="cv", logy=True)

# Slices of the PMF.  Near the peak the distribution is extremely wide: the
# most likely single value is 0, the mean is e^10.
slices = []
for t in (10.0, 30.0, 57.0, 150.0, 300.0):
    sl = pmf(tab, t, 1, 200_000)
    k = np.arange(len(sl.p))
    slices.append((k[1:], sl.p[1:], f"t = {t:g}"))
    median = int(np.searchsorted(np.cumsum(sl.p), 0.5))
    print(f"t = {t:5g}: P_0 = {sl.p[0]:.4f}, median = {median}, tail beyond 2e5 = {sl.tail:.2e}")
line_plot(OUT / "pmf_slices.svg", slices, "P_k(t) for k >= 1", xlabel="k", ylabel="P_k", logy=True)

# Several initial cases: the law is a mixture over how many initial lineages
# survive, each surviving lineage contributing a geometric number of cases.
sl = pmf(tab, 57.0, 5, 400_000)
print(f"I0 = 5 at t = 57: P_0 = {sl.p[0]:.3e} = alpha^5, mass check {sl.p.sum() + sl.tail:.12f}")

# The mesh Z[k, t], decimated in k for plotting.
times = np.arange(0.0, 501.0, 5.0)
grid = mesh(tab, times, 4000, 1, k_stride=20)
heatmap(OUT / "mesh.svg", times, grid.ks, grid.z, "P_k(t), log10 color")
line_plot(OUT / "pk_rows.svg", [(times, grid.row(k), f"k = {k}") for k in (0, 20, 200, 2000)],
          "P_k(t) for fixed k", ylabel="P_k", logy=True)
print(f"plots written to {OUT}")
