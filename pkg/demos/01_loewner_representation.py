"""
The derivative as a Loewner integral
====================================

phi'(x) = a + b * int s / (1 - lam s) dmu(lam),  s = 2x - 1.
"""

import numpy as np

from relentropy.loewner import (
    bosonic,
    check_rep_consistency,
    eval_phi_prime_rep,
    fermionic,
    integrability_diagnostics,
    power2,
)

for spec in (fermionic(), bosonic(), power2()):
    print(f"{spec.name}: a={spec.a:.6f} b={spec.b:.6f} c={spec.c:.6f}")

# quadrature of the representation vs the closed form, on a Chebyshev grid
for spec in (fermionic(), bosonic()):
    rep = check_rep_consistency(spec, grid_size=101, tol=1e-8)
    print(f"{spec.name}: max |phi' error| {rep.max_prime_deviation:.1e}, max |phi error| {rep.max_phi_deviation:.1e}")

x = 0.25
print("phi'(0.25) from the measure:", eval_phi_prime_rep(fermionic(), x), " closed form:", np.log(x / (1 - x)))

# mass near lam = +-1 decides whether phi' blows up at the ends of [0, 1]
for spec in (fermionic(), bosonic(), power2()):
    r = integrability_diagnostics(spec)
    print(spec.name, r)
