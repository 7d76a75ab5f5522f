"""Independent checks of the closed forms.

The forward equations on a truncated state space reproduce the closed-form
PMF on a short horizon.  With arrivals there is no closed form; there the
forward equations are compared with the branching decomposition (initial
lineages plus a Poisson stream of immigrant lineages), which also reaches
horizons where the forward equations would need a million states.
"""
import numpy as np

from nhbdi import branching_solve, build_table, extinction_probability, forward_solve, pmf, running_example
from nhbdi.deterministic import expected_infected

sc = running_example(10.0, t_end=8.0)
q = forward_solve(sc, 8.0, 400)
p = pmf(build_table(sc), 8.0, 1, 400)
print(f"birth-death, t = 8: max |P_k - q_k| = {np.max(np.abs(p.p - q.q)):.1e}, leaked {q.leaked:.1e}")

sc = running_example(10.0, nu0=0.2, t_end=8.0)
tab = build_table(sc)
q = forward_solve(sc, 8.0, 600)
b = branching_solve(tab, 8.0, 600)
print(f"with arrivals, t = 8: max |branching - forward| = {np.max(np.abs(b.q - q.q)):.1e}")
print(f"mean {q.mean():.6f} vs expected count {expected_infected(tab, 1)[-1]:.6f}")

# Long horizon with arrivals: extinction and medians.
tab = build_table(running_example(10.0, nu0=0.2))
print(f"P(I(500) = 0) = {extinction_probability(tab, 500.0):.5f}")
for t, K in ((150.0, 4096), (300.0, 1024)):
    dist = branching_solve(tab, t, K)
    print(f"t = {t:g}: median {dist.quantile(0.5)}, P_0 = {dist.q[0]:.5f}")
