"""
Explicit constants of the exponential-type lower bound
=======================================================

Walks through c_{a,sigma}, h(z) and its infimum B, M(2), and the envelope
constants for unit-energy data.
"""

import numpy as np

from gevrey_ns import GevreyParams
from gevrey_ns.blowup import c_a_sigma, envelope, envelope_constants, h_function, infimum_B
from gevrey_ns.inequalities import cdelta, cdelta_limit, m_bound

# c_{a,sigma}^2: quadrature against two closed forms
for a, sigma in [(0.5, 1.5), (1.0, 2.0), (2.0, 3.0)]:
    rep = c_a_sigma(a, sigma)
    print(f"a={a} sigma={sigma}: quadrature {rep.quadrature:.10g}, "
          f"b^-sigma form {rep.closed_form_neg_sigma:.10g}, b^(sigma-2) form {rep.closed_form_sigma_minus_2:.10g}")

# h(z) starts at 1/(m+1)!, dips, then grows like exp(z/2)
m = 4
z = np.geomspace(1e-3, 60, 9)
print("h(z), m=4:", np.round(h_function(z, m), 6))
print("B(m) for m = 2..12:", [f"{infimum_B(k)['B']:.3g}" for k in range(2, 13)])

# interpolation constants
print(f"C_2 = {cdelta(2.0):.6f}, C_inf = {cdelta_limit():.6f}, M(2) = {m_bound(2.0)['M']:.6f}")

params = GevreyParams(a=1.0, sigma=2.0, nu=1.0)
ep = envelope_constants(1.0, params)
print(ep.as_dict())
for gap in (1.0, 1e-2, 1e-4, 1e-6):
    print(f"T*-t = {gap:g}: envelope {envelope(1.0 - gap, 1.0, ep, params):.4g}")
