"""
Watching the instability grow
=============================

Integrate dh/dt = T h with classical RK4 from seeded random data. The norm
that makes the unperturbed operator skew-adjoint weighs buoyancy by 1/N^2
and vorticity by 1/|v|^2, so with eps = 0 the norm stays constant and any
growth comes from the primary wave.
"""
from psiwave import PrimaryWave, solve_branch
from psiwave.spectral import growth_sim, unstable_pair

pw = PrimaryWave(1, 1)
mu = solve_branch(pw, 1.0, "plus").mu
eps, M = 0.05, 8

target = unstable_pair(pw, mu, eps, M=32).max_re
fit = growth_sim(pw, mu, eps, M, t_end=20 / target, dt=0.01, seed=7)
print("eigenvalue max Re:", target)
print("fitted rate      :", fit.rate)
print("fit window       :", fit.fit_window, "rms", fit.residual_rms)

calm = growth_sim(pw, mu, 0.0, M, t_end=100.0, dt=0.01, seed=7)
print("rate with eps = 0:", calm.rate)
