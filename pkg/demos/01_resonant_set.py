"""
The resonant set of a primary wave
==================================

A plane internal wave with wavevector k = (m, n) can feed two secondary waves
with wavevectors mu and k + mu when their frequencies add up:

    Omega(k) = Omega(k + mu) + Omega(mu),    Omega(v) = N v1 / |v|.

For each height y this equation has exactly one solution x on each branch,
so the resonant set is the union of two curves x = phi_+(y), x = phi_-(y).
"""
import numpy as np

from psiwave import PrimaryWave, solve_branch
from psiwave.errors import NoRootError
from psiwave.resonance import (kink_slope, large_y_slope, small_y_coefficient)

pw = PrimaryWave(1, 1)

# Near the origin both branches hug a parabola x ~ +-C y^2
C = small_y_coefficient(pw)
print("small y: x / y^2 against C =", C)
for y in (0.2, 0.1, 0.05, 0.025):
    x = solve_branch(pw, y, "plus").mu[0]
    print(f"  y={y:<6} x/y^2={x / y**2:.6f}")

# Far away they become straight lines with slope +-m / sqrt(3 m^2 + 4 n^2)
print("\nlarge y: x / y against", large_y_slope(pw))
for y in (10.0, 100.0, 1000.0):
    x = solve_branch(pw, y, "plus").mu[0]
    print(f"  y={y:<7} x/y={x / y:.6f}")

# The minus branch passes through (0, -2n) for every primary wave
print("\nanchor phi_-(-2n):", solve_branch(pw, -2.0, "minus").mu[0])

# Steep waves (n^2 > 3 m^2) have a corner on the minus branch at y = -n,
# where the curve is only Lipschitz and the equation has no root at all.
steep = PrimaryWave(1, 3)
print("\nk = (1, 3): corner at y = -3, one-sided slope", kink_slope(steep))
for y in np.linspace(-3.2, -2.8, 9):
    try:
        x = solve_branch(steep, y, "minus").mu[0]
        print(f"  y={y:+.2f} x={x:+.6f}")
    except NoRootError:
        print(f"  y={y:+.2f} (no root: corner of the curve)")
