"""Expected infectious count, cumulative counts and daily new cases.

Three starting conditions: one initial case and no arrivals, arrivals only,
and both.  The expected counts obey I = I0 + A + B - R, which is checked here
even though I is a closed form and B, R come from separate quadratures.
"""
from pathlib import Path

import numpy as np

from nhbdi import approx_expected_infected, build_table, deterministic_series, running_example
from nhbdi.svg import line_plot

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

for nu0, i0 in [(0.0, 1), (0.2, 0), (0.2, 1)]:
    tab = build_table(running_example(10.0, nu0=nu0, i0=i0))
    ser = deterministic_series(tab)
    peak = np.argmax(ser.i_bar)
    print(f"nu0 = {nu0}, I0 = {i0}: peak {ser.i_bar[peak]:10.1f} at t = {ser.grid[peak]:.2f}; "
          f"max residual of I = I0 + A + B - R: {ser.residual().max():.1e}")

# The peak sits where lambda(t) falls through mu, inside the transition.
curves = []
for d in (0.0, 5.0, 10.0):
    ser = deterministic_series(build_table(running_example(d)))
    print(f"d = {d:>4g}: peak at t = {ser.grid[np.argmax(ser.i_bar)]:.2f}, "
          f"I(300) = {ser.i_bar[ser.grid == 300.0][0]:.3f}")
    curves.append((ser.grid, ser.i_bar, f"d = {d:g}"))
line_plot(OUT / "expected_infected.svg", curves, "expected infectious count", ylabel="cases", logy=True)

# Daily counts on days (t-1, t].  With constant mu, recoveries track I.
ser = deterministic_series(build_table(running_example(10.0, nu0=0.2, i0=1)))
line_plot(OUT / "daily.svg",
          [(ser.days, ser.i_new, "new infections"), (ser.days, ser.r_new, "new recoveries")],
          "expected daily counts", xlabel="day", ylabel="cases")
top = np.argmax(ser.i_new)
print(f"busiest day for new infections: day {ser.days[top]} with {ser.i_new[top]:.0f}")

# The closed-form approximation is good while the epidemic grows and drifts
# once the neglected integral stops being small.
tab = build_table(running_example(10.0, nu0=0.2, i0=1))
approx = approx_expected_infected(tab)
for t in (25, 100, 150, 200, 300):
    i = tab.index_of(float(t))
    print(f"t = {t:3d}: approximation off by {approx.values[i] / ser.i_bar[i] - 1:+.2%}")
