"""Simulated sample paths compared with the analytic results.

Pass the number of paths as the first argument (default 20000).
"""
import sys
from pathlib import Path

import numpy as np

from nhbdi import (
    build_table,
    deterministic_series,
    empirical_pmf_distance,
    forward_solve,
    homogeneous,
    pmf,
    run_ensemble,
    running_example,
    simulate_path,
)
from nhbdi.svg import line_plot

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
reps = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000

# One path of the running example with arrivals: a wide spread is expected
# (the coefficient of variation is about 1.4 through the peak).
sc = running_example(10.0, nu0=0.2)
for seed in (1, 2, 3):
    log = simulate_path(sc, seed, horizon=120.0)
    print(f"path {seed}: {len(log)} events, I(57) = {log.state_at(57.0)}, I(120) = {log.final_state}")

# Homogeneous goodness of fit at t = 20.
sc = homogeneous(0.12, 0.1, i0=1, t_end=20.0)
ens = run_ensemble(sc, [20.0], replications=reps, keep_daily=False)
ref = pmf(build_table(sc), 20.0, 1, 400)
print(f"TV distance at t = 20: {empirical_pmf_distance(ens, ref):.4f} with {reps} paths; "
      f"extinct {ens.extinction_fraction():.4f} vs {ref.p[0]:.4f}")

# With arrivals the reference is the forward-equation solution.
sc = running_example(10.0, nu0=0.2, t_end=8.0)
ens = run_ensemble(sc, [8.0], replications=reps, keep_daily=False)
print(f"TV distance at t = 8 with arrivals: {empirical_pmf_distance(ens, forward_solve(sc, 8.0, 600)):.4f}")

# Daily recoveries: sample mean against the expected daily count.
sc = homogeneous(0.12, 0.1, 0.2, i0=1, t_end=100.0)
ens = run_ensemble(sc, replications=reps)
ser = deterministic_series(build_table(sc))
rec = ens.daily_stats("recoveries")
z = (rec["mean"] - ser.r_new) / rec["se"]
print(f"daily recoveries: largest deviation {np.abs(z).max():.2f} standard errors over {len(z)} days")
line_plot(OUT / "daily_recoveries.svg",
          [(rec["day"], rec["mean"], "simulated mean"), (ser.days, ser.r_new, "expected"),
           (rec["day"], rec["q05"], "5%"), (rec["day"], rec["q95"], "95%")],
          "daily recoveries", xlabel="day", ylabel="cases")
