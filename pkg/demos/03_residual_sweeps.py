"""
How far from exact is the closed form?
======================================

lower(s, t) phi(-s) is the exact integral only when phi is constant
(the exponential family). For the other families it approaches the
integral as t grows. A sweep along t shows the relative residual
against the oracle (termwise series inside the convergence radius,
quadrature outside it).
"""

import sys

from fmellin import Binomial, Catalan, Exponential, Geometric
from fmellin.verify_harness import sweep_parameter, write_sweep_csv

# exact case: residuals sit at rounding level
rows = sweep_parameter(Exponential(), "t", [0.5, 2, 10, 50], s=1.5)
print("exponential, s=1.5:", ", ".join(f"{r['rel_err']:.1e}" for r in rows))

# 1/(1+x)^2 at s=1: the residual is |(1 - e^-t) - t/(1+t)| exactly
rows = sweep_parameter(Binomial(k=2.0), "t", [0.25, 0.5, 5, 50, 500], s=1.0)
for r in rows:
    print(f"binomial k=2  t={r['t']:<6g} closed={r['value']:.8f} "
          f"oracle={r['oracle']:.8f} rel={r['rel_err']:.2e}")

# 1/(1+x^5) in the substituted form: the residual falls monotonically
rows = sweep_parameter(Geometric(k=5.0), "t", [1, 2, 5, 10, 100], s=0.5,
                       method="substitution_geo")
write_sweep_csv(rows, sys.stdout)

# along s at fixed t, with a pole of the continuation in the grid
rows = sweep_parameter(Catalan(mu=3), "s", [0.25, 0.5, 1.0, 1.5, 2.0], t=0.2)
for r in rows:
    print(f"catalan mu=3  s={r['s']:<5g}", r.get("error") or f"rel={r['rel_err']:.3e}")
