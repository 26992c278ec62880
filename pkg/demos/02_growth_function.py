"""
Growth rates along the resonant set
===================================

At a resonant mu the two colliding eigenvalues i w_ split under the primary
wave of amplitude eps into i w_ +- eps sqrt(e(mu)). When e > 0 one of them
moves into the right half plane: the parametric subharmonic instability.
"""
import numpy as np

from psiwave import PrimaryWave, solve_branch
from psiwave.reduced import (b_coeffs, e_from_I, e_large_limit, e_mu, e_small_tau_slope,
                             mu_of_tau, w_underline)

pw = PrimaryWave(1, 1)

print(f"{'y':>8} {'mu1':>10} {'w_':>9} {'b1':>10} {'b0':>10} {'e':>10}")
for y in (-20.0, -5.0, -1.0, -0.3, 0.3, 1.0, 3.0, 30.0, 300.0):
    mu = solve_branch(pw, y, "plus" if y > 0 else "minus").mu
    b1, b0 = b_coeffs(pw, mu)
    print(f"{y:8.2f} {mu[0]:10.5f} {w_underline(pw, mu):9.5f} {b1:10.5f} {b0:10.5f} {e_mu(pw, mu):10.5f}")

# e is positive in both asymptotic regimes of the plus branch, but not
# everywhere: on part of the minus branch it is negative and the collision
# only shifts the frequencies.

# Small Floquet parameters: e grows linearly in tau with slope m^2 n^2 / (4 N^2 |k|^2)
print("\nsmall tau, e / tau ->", e_small_tau_slope(pw))
for tau in (1e-1, 1e-2, 1e-3):
    print(f"  tau={tau:g}: {e_mu(pw, mu_of_tau(pw, tau)) / tau:.6f}")

# Large Floquet parameters: e saturates
print("\nlarge y, e ->", e_large_limit(pw))

# The classical triad interaction coefficients give the same growth function
mu = solve_branch(pw, 0.7, "plus").mu
print("\ntriad form vs reduced matrix at y=0.7:", e_from_I(pw, mu), e_mu(pw, mu))
