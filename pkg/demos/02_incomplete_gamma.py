"""
Incomplete gamma functions
==========================

lower(s, t) and upper(s, t) split Gamma(s) at t. Below t = s + 1 the
power series converges fast; above it the continued fraction for the
upper function does, and the other half follows from the complement.
"""

import numpy as np

from fmellin import gamma, integrate_finite, lower_inc_gamma

s_grid = [0.1, 0.5, 1.0, 2.5, 10.0]
t_grid = [0.01, 0.1, 1.0, 10.0, 100.0]

# one half is always formed from the other, so the complement holds by
# construction; quadrature of the defining integral is the real check
print("relative difference from quadrature of x^(s-1) e^-x over [0, t]")
print("s \\ t   " + "".join(f"{t:>10g}" for t in t_grid))
for s in s_grid:
    row = []
    for t in t_grid:
        q = integrate_finite(lambda x: x ** (s - 1) * np.exp(-x), 0.0, t).value
        row.append(abs(lower_inc_gamma(s, t) - q) / q)
    print(f"{s:<8g}" + "".join(f"{e:10.1e}" for e in row))

# the regularized lower function climbs from 0 to 1 around t = s
s = 2.5
for t in np.geomspace(0.1, 30, 8):
    p = lower_inc_gamma(s, t) / gamma(s)
    print(f"t={t:8.3f}  P(2.5, t)={p:.12f}  " + "#" * int(40 * p))

# negative arguments go through reflection; poles raise
print("Gamma(-2.5) =", gamma(-2.5))
