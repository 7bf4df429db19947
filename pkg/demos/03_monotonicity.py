"""
Contractions never increase the entropy
=======================================

H(X A X*, X B X*) <= H(A, B) for every contraction X when phi' is operator
monotone.  With phi' = x^3, which is increasing but not operator monotone, a
random search finds a violation quickly.
"""

from relentropy.lab import counterexample_search, monotonicity_trials, replay_witness
from relentropy.loewner import atom, bosonic, fermionic, nonmonotone_quartic, power2

for spec in (fermionic(), bosonic(), power2(), atom(0.5)):
    r = monotonicity_trials(spec, 6, 4, 300, seed=0)
    print(f"{spec.name:10s} 300 trials, violations: {len(r.violations)}, largest H(XAX*,XBX*) - H(A,B): {r.max_violation:.3e}")

quartic = nonmonotone_quartic()
r = counterexample_search(quartic, trials=100_000, seed=0)
print(f"x^3 derivative: violation {r.max_violation:.4e} after {r.trials} trials")
print("compressed dims:", r.witness["X"].get("shape"), " replayed:", replay_witness(quartic, r.witness))

# the same search with an operator monotone derivative finds nothing
print("power2 control inconclusive:", counterexample_search(power2(), 2000, seed=0).inconclusive)
