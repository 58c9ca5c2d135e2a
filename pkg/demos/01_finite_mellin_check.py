"""
A finite Mellin transform, three ways
=====================================

The integral of x^(-1/2) / (1 + x^5) over [0, 100] evaluated by
quadrature, by the substituted incomplete-gamma closed form and by the
literal closed form without the 1/k Jacobian.
"""

import math

from fmellin import Geometric, QuadratureConfig, geometric_substitution, quadrature_mellin

s, k, t = 0.5, 5.0, 100.0

# quadrature of the integrand itself; the x^(-1/2) singularity at 0 is
# absorbed by the tanh-sinh node clustering
quad = quadrature_mellin(Geometric(k=k), s, 0.0, t, QuadratureConfig(), k=k)
print(f"quadrature          {quad.value:.10f}  (est. error {quad.est_error:.1e}, "
      f"{quad.evals} evaluations)")

# (1/k) lower(s/k, t^k) Gamma(1 - s/k): change of variables y = x^k
sub = geometric_substitution(s, k, t, "substitution_consistent")
print(f"substituted form    {sub.value:.10f}  rel. diff {abs(sub.value - quad.value) / quad.value:.1e}")

# lower(s/k, t) Gamma(1 - s/k): no Jacobian and t in place of t^k
lit = geometric_substitution(s, k, t, "paper_literal")
print(f"literal form        {lit.value:.10f}  ratio to quadrature {lit.value / quad.value:.6f}")

# at t = 100, lower(0.1, 100) is Gamma(0.1) to full precision, so the
# literal value is the reflection product pi / sin(pi/10)
print(f"pi / sin(pi/10)     {math.pi / math.sin(math.pi / 10):.10f}")
