"""Noise budgets: how large an error still reaches a target accuracy.

Three calculators answer "given target accuracy eps, how much gradient
error is tolerable and how many steps suffice":

* strongly convex problems solved directly,
* merely convex problems via the proximal regularization reduction
  (adding (mu/2)||x - x0||^2 with mu = (2/3) eps / R^2 biases the optimum
  by at most eps/3 and buys a linear rate),
* least-squares residual targets via the certified stopping rule.

Each budget is then spent end to end and the promise checked.
"""

import numpy as np

import agmnoise as ag
from agmnoise import bounds, stm

# 1. strongly convex ---------------------------------------------------------
p1 = ag.worst_case_strongly_convex(0.1, 10.0, 40)
x0 = np.zeros(40)
R1 = float(np.linalg.norm(x0 - p1.known_argmin))
eps = 0.05
delta, n_min = bounds.noise_budget_strongly_convex(eps, p1.mu, p1.lips, R1)
params = ag.params_for(p1, tau=2, max_iters=n_min)
gap = ag.run(p1, ag.Absolute(delta), params, x0, ag.RngStream(0)).final_gap
print(f"strongly convex: eps={eps}  delta_max={delta:.4f}  N={n_min}  "
      f"achieved gap={gap:.4f}")

# 2. convex via regularization -------------------------------------------------
p2 = ag.worst_case_convex(1.0, 25, 50)
x0 = np.zeros(50)
R2 = float(np.linalg.norm(x0 - p2.known_argmin))
eps = 0.1
mu, delta, n_min = bounds.noise_budget_regularized(eps, 2 * p2.lips, R2)
trace = stm.solve_regularized(p2, ag.Absolute(delta), eps, R2, x0,
                              ag.RngStream(0), max_iters=n_min)
print(f"regularized convex: eps={eps}  mu={mu:.5f}  delta_max={delta:.5f}  "
      f"N={n_min}  achieved gap={trace.final_gap:.4f}")

# 3. least-squares residual ------------------------------------------------------
rng = np.random.default_rng(5)
A = rng.normal(size=(20, 20)) + 5 * np.eye(20)
b = rng.normal(size=20)
p3 = ag.linear_system(A, b)
R3 = float(np.linalg.norm(p3.known_argmin))
eps0 = 0.05
delta, n_eps0 = bounds.noise_budget_linear_system(eps0, 2 * p3.lips, R3)
rule = ag.KnownFstar(eps=eps0 ** 2 / 6, R=R3, fstar=0.0)
params = ag.params_for(p3, tau=1, max_iters=2 * n_eps0, stop=rule)
tr = ag.run(p3, ag.Absolute(delta), params, np.zeros(20), ag.RngStream(0))
resid = float(np.linalg.norm(A @ tr.x_final - b))
print(f"linear system: eps0={eps0}  delta_max={delta:.6f}  stop bound={n_eps0}  "
      f"stopped at {tr.k[-1]}  residual={resid:.4f}")
