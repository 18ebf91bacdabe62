"""Early stopping: quit before the noise starts to win.

When the optimal value is known (least squares with a consistent system,
say), the run can be stopped at the first iterate satisfying a certified
test.  Until that test fires the trajectory provably stays within the
starting radius, the test always fires within ceil(sqrt(2 L R^2 / eps))
iterations, and the iterate it returns carries a post-hoc accuracy
certificate.  The adaptive variant replaces a worst-case radius term with
a measured sum and typically fires earlier.
"""

import math

import numpy as np

import agmnoise as ag

problem = ag.worst_case_convex(1.0, 50, 100)
x0 = np.zeros(problem.dim)
R = float(np.linalg.norm(x0 - problem.known_argmin))
L = 2 * problem.lips
eps = 1e-4 * L * R * R  # well below the initial gap, so stopping takes work
nmax = ag.n_max(L, R, eps)
delta = min(math.sqrt(eps * L / (3 * (nmax + 1))), eps / (9 * R))
delta2 = delta * delta / L
cert = delta2 * (nmax + 1) + 3 * R * delta + eps

print(f"eps={eps:.3f}  budget n_max={nmax}  tolerable delta={delta:.4f}")
print(f"post-hoc certificate: gap <= {cert:.3f}")
print(f"{'rule':>12} {'seed':>5} {'stopped at':>11} {'final gap':>11} {'certified':>10}")
for name, rule in (("known f*", ag.KnownFstar(eps=eps, R=R, fstar=problem.known_min)),
                   ("adaptive", ag.Adaptive(eps=eps, R=R, fstar=problem.known_min))):
    params = ag.params_for(problem, tau=1, max_iters=3 * nmax, stop=rule)
    for seed in range(3):
        tr = ag.run(problem, ag.Absolute(delta), params, x0, ag.RngStream(seed))
        ok = "yes" if tr.final_gap <= cert else "NO"
        print(f"{name:>12} {seed:5d} {tr.k[-1]:11d} {tr.final_gap:11.4f} {ok:>10}")
