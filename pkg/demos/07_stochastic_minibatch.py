"""Stochastic gradients and mini-batches.

A mini-batch of m component gradients (drawn with replacement) has
exactly 1/m of the single-sample error variance, and the expectation
bound for the stochastic method matches the deterministic one with the
measured mean radius in place of the worst-case one.  Unbiasedness is
never assumed by the solver; it just happens to hold here.
"""

import math

import numpy as np

import agmnoise as ag
from agmnoise.experiments import make_finite_sum_instance
from agmnoise.stm import init_state, stm_step

fsum = make_finite_sum_instance(components=10, dim=5)
x = np.ones(5)
print("mini-batch error variance at a fixed point (10k trials):")
print(f"{'batch':>6} {'variance':>12} {'x batch':>10}")
for m in (1, 2, 4, 8):
    est = ag.minibatch_variance_estimate(fsum, x, m, 10_000, ag.RngStream(0))
    print(f"{m:6d} {est:12.4f} {est * m:10.4f}")
print("(variance times batch size is constant: the 1/m law)\n")

# stochastic runs: 30-seed mean against the expectation bound
p = ag.worst_case_strongly_convex(0.1, 10.0, 30)
x0 = np.zeros(30)
R = float(np.linalg.norm(x0 - p.known_argmin))
delta, N = 0.5, 300
params = ag.params_for(p, tau=1, max_iters=N)
gaps, b_tilde = [], 0.0
for seed in range(30):
    rng = ag.RngStream(seed)
    st = init_state(p, params, x0, ag.Stochastic(delta), rng)
    for _ in range(N):
        st = stm_step(st, params, p, ag.Stochastic(delta), rng)
    gaps.append(ag.evaluate(p, st.x) - p.known_min)
mean_gap = float(np.mean(gaps))
L = 2 * p.lips
bound = L * R * R * math.exp(-0.5 * math.sqrt(p.mu / L) * N) \
    + (1 + math.sqrt(L / p.mu)) * delta ** 2 / L + 3 * R * delta
print(f"stochastic runs (delta={delta}, N={N}, 30 seeds):")
print(f"  mean terminal gap : {mean_gap:.4f}")
print(f"  expectation bound : {bound:.4f}  (with the worst-case radius)")
