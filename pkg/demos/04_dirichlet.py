"""
Dilated copies and Dirichlet coefficients
=========================================

Summing a_m f(m x) multiplies the classical transform by
g(s) = sum a_m m^-s. On a finite range each copy sees its own upper
limit m t, so the literal product lower(s, t) phi(-s) g(s) drifts from
the integral at small t while the scale-consistent sum does not.
"""

import numpy as np

from fmellin import DirichletSpec, Exponential, dirichlet_finite_mellin, integrate_finite
from fmellin.mellin_engine import dirichlet_integrand

spec = Exponential()
d = DirichletSpec((1.0, 1.0, 1.0))
s = 2.0

print(f"g({s:g}) = {d.g(s):.12f}")
print(f"{'t':>6} {'quadrature':>16} {'scale-consistent':>18} {'literal':>16}")
for t in (0.5, 1.0, 3.0, 10.0, 30.0):
    q = integrate_finite(dirichlet_integrand(spec, d, s), 0.0, t).value
    sc = dirichlet_finite_mellin(spec, d, s, t, "scale_consistent").value
    lit = dirichlet_finite_mellin(spec, d, s, t, "paper_literal").value
    print(f"{t:6g} {q:16.12f} {sc:18.12f} {lit:16.12f}")

# alternating coefficients: the eta-style weights 1, -1, 1, -1
d = DirichletSpec(np.resize([1.0, -1.0], 6))
q = integrate_finite(dirichlet_integrand(spec, d, 1.5), 0.0, 4.0).value
sc = dirichlet_finite_mellin(spec, d, 1.5, 4.0).value
print(f"alternating weights, s=1.5, t=4: quadrature {q:.14f}, closed form {sc:.14f}")
