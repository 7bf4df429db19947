"""
Eigenvalues at 0 and 1
======================

For the fermionic phi, phi' blows up at both ends of [0, 1].  If B has an
eigenvalue there, H(A, B) is finite only when A agrees with B on that
eigenspace, and then the trace lives on the complement.
"""

import numpy as np

from relentropy.entropy import classify_singular_case, relative_entropy_direct, relative_entropy_integral
from relentropy.lab import PROBE_MODES, singular_probe
from relentropy.loewner import bosonic, fermionic

spec = fermionic()
B = np.diag([0.0, 0.5, 0.6])
for A in (np.diag([0.0, 0.3, 0.8]), np.diag([0.1, 0.3, 0.8])):
    case = classify_singular_case(spec, A, B)
    print(case.at_zero.value, relative_entropy_direct(spec, A, B), relative_entropy_integral(spec, A, B))

# random rotated versions, with sweeps putting the kernel vector first or last
for s in (fermionic(), bosonic()):
    for mode in PROBE_MODES:
        p = singular_probe(s, mode, dim=4, seed=0)
        first = ["inf" if not v.is_finite else f"{v.value:.3f}" for v in p.sweep_kernel_first.values]
        last = ["inf" if not v.is_finite else f"{v.value:.3f}" for v in p.sweep_kernel_last.values]
        print(f"{s.name:9s} {mode:16s} H={p.direct.to_json()!s:22.22s} kernel first {first}  kernel last {last}")
