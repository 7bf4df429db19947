"""
Growing projections
===================

Along a nested chain P_1 <= P_2 <= ... the entropies H(P A P, P B P) increase
and end at the full value.  Compressions (1 - 2^-n) I approach it from below.
"""

import numpy as np

from relentropy.hermitian import Contraction, ProjectionChain, random_state
from relentropy.lab import compression_sweep, projection_sweep
from relentropy.loewner import fermionic

spec = fermionic()
n = 32
rng = np.random.default_rng(3)
A = random_state(n, 0.1, 0.9, seed=rng)
B = random_state(n, 0.1, 0.9, seed=rng)

trace = projection_sweep(spec, A, B, ProjectionChain.random_nested(n, seed=3))
for k, v in zip(trace.ranks, trace.values):
    if k in (1, 2, 4, 8, 16, 24, 31, 32):
        print(f"rank {k:2d}: {v.value:.12f}")
print("full value:", trace.limit_value.value, " monotone:", trace.is_monotone())

Xs = [Contraction((1 - 2.0**-k) * np.eye(n)) for k in range(1, 21)]
comp = compression_sweep(spec, A, B, Xs)
gaps = [trace.limit_value.value - v.value for v in comp.values]
print("gap to full value for (1 - 2^-k) I, k = 1, 5, 10, 20:", [f"{gaps[i]:.2e}" for i in (0, 4, 9, 19)])

# the trace also goes out as CSV for external plotting
print(trace.to_csv().splitlines()[:3])
