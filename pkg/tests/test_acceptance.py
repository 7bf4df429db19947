"""The nine acceptance criteria, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are repeated
in the terminal summary.
"""

import math
import time
from pathlib import Path

import json
import numpy as np
import pytest

from relentropy.entropy import (
    relative_entropy_direct,
    relative_entropy_gateaux,
    relative_entropy_integral,
    theorem4_check,
)
from relentropy.hermitian import ProjectionChain, hs_norm, random_state, random_unitary
from relentropy.lab import (
    counterexample_search,
    monotonicity_trials,
    projection_sweep,
    replay_witness,
    singular_probe,
)
from relentropy.loewner import (
    atom,
    bosonic,
    check_rep_consistency,
    fermionic,
    integrability_diagnostics,
    nonmonotone_quartic,
    power2,
)
from relentropy.quad import verify_resolvent_identity

from conftest import ACCEPTANCE_LINES, binary_relative_entropy

FIXTURES = Path(__file__).parent / "fixtures"
TRIANGLE_SPECS = [fermionic(), bosonic(), power2(), atom(0.5), atom(-0.5)]
MONOTONE_SPECS = TRIANGLE_SPECS


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def interior_pair(seed, n):
    rng = np.random.default_rng(seed)
    return random_state(n, 0.1, 0.9, seed=rng), random_state(n, 0.1, 0.9, seed=rng)


@pytest.fixture(scope="module")
def triangle():
    """100 pairs per spec, dims cycling through 2..16, with every integrand sample."""
    rows = []
    samples = {"min": math.inf, "excess": -math.inf, "count": 0}

    def collect(lams, ts, vals, bound):
        samples["min"] = min(samples["min"], float(vals.min()))
        samples["excess"] = max(samples["excess"], float((vals - bound).max()))
        samples["count"] += vals.size

    start = time.perf_counter()
    for k, spec in enumerate(TRIANGLE_SPECS):
        for i in range(100):
            A, B = interior_pair(1000 * k + i, 2 + i % 15)
            d = relative_entropy_direct(spec, A, B).value
            g = relative_entropy_gateaux(spec, A, B).value
            q = relative_entropy_integral(spec, A, B, on_sample=collect).value
            rows.append((spec.name, A, B, d, g, q))
    elapsed = time.perf_counter() - start
    return rows, samples, elapsed


def test_criterion_1_representation_fidelity():
    start = time.perf_counter()
    reps = [check_rep_consistency(s, 101, 1e-8) for s in (fermionic(), bosonic())]
    elapsed = time.perf_counter() - start
    worst = max(max(r.max_prime_deviation, r.max_phi_deviation) for r in reps)
    report(1, all(r.passed for r in reps) and elapsed < 5,
           f"max deviation {worst:.2e} (<= 1e-8), {elapsed:.2f}s (< 5s)")


def test_criterion_2_formula_triangle(triangle):
    rows, _, elapsed = triangle
    dg = max(abs(d - g) for *_, d, g, _ in rows)
    di = max(abs(d - q) / max(d, 1e-8) for *_, d, _, q in rows)
    report(2, dg <= 1e-9 and di <= 1e-4 and elapsed < 180,
           f"{len(rows)} pairs, |direct-gateaux| {dg:.2e} (<= 1e-9), "
           f"relative |direct-integral| {di:.2e} (<= 1e-4), {elapsed:.1f}s (< 180s)")


def test_criterion_3_monotonicity_and_counterexample():
    worst = -math.inf
    violations = 0
    for k, spec in enumerate(MONOTONE_SPECS):
        for j, (da, db) in enumerate([(8, 5), (6, 6), (4, 2), (3, 1)]):
            r = monotonicity_trials(spec, da, db, 250, seed=100 * k + j)
            worst = max(worst, r.max_violation)
            violations += len(r.violations)
    search = counterexample_search(nonmonotone_quartic(), 100_000, seed=0, dims=(2, 3))
    frozen = json.loads((FIXTURES / "quartic_witness.json").read_text())
    replay = replay_witness(nonmonotone_quartic(), frozen)
    found = not search.inconclusive and search.max_violation > 1e-6
    stable = search.witness == frozen and replay == frozen["violation"]
    report(3, violations == 0 and found and stable,
           f"1000 trials x {len(MONOTONE_SPECS)} specs, {violations} violations (max excess {worst:.2e}); "
           f"x^3 witness at trial {search.trials - 1} with violation {search.max_violation:.3e}, replay stable={stable}")


def test_criterion_4_projection_sweeps():
    start = time.perf_counter()
    bad = 0
    worst_gap = 0.0
    for i in range(50):
        n = 8 + (56 * i) // 49
        A, B = interior_pair(5000 + i, n)
        trace = projection_sweep(fermionic(), A, B, ProjectionChain.random_nested(n, seed=5000 + i))
        worst_gap = max(worst_gap, abs(trace.values[-1].value - trace.limit_value.value))
        bad += not (trace.is_monotone(1e-9) and trace.matches_limit(1e-9))
    elapsed = time.perf_counter() - start
    report(4, bad == 0 and elapsed < 120,
           f"50 sweeps at dims 8-64, {bad} failures, final-vs-full gap {worst_gap:.2e} (<= 1e-9), {elapsed:.1f}s (< 120s)")


def test_criterion_5_trace_identity(triangle):
    rows, _, _ = triangle
    by_name = {s.name: s for s in TRIANGLE_SPECS}
    worst = max(theorem4_check(by_name[name], A, B).difference for name, A, B, *_ in rows)
    report(5, worst <= 1e-9, f"max |lhs - rhs| {worst:.2e} over {len(rows)} instances (<= 1e-9)")


def test_criterion_6_singular_cases():
    cases = [(fermionic(), m) for m in ("MismatchAtZero", "AgreementAtZero", "MismatchAtOne", "AgreementAtOne")]
    cases += [(bosonic(), m) for m in ("MismatchAtZero", "AgreementAtZero")]
    failures = []
    worst = 0.0
    for spec, mode in cases:
        for dim in (3, 5):
            for seed in range(3):
                p = singular_probe(spec, mode, dim=dim, seed=seed, tol=1e-9)
                if not p.passed:
                    failures.append((spec.name, mode, dim, seed))
                if mode.startswith("Agreement"):
                    worst = max(worst, max(abs(v.value - p.complement.value) for v in p.formula_values))
    report(6, not failures,
           f"{len(cases) * 6} probes, failures {failures or 'none'}, agreement vs complement {worst:.2e} (<= 1e-9)")


def test_criterion_7_analytic_anchors():
    worst_p2 = 0.0
    for i in range(100):
        A, B = interior_pair(7000 + i, 2 + i % 7)
        worst_p2 = max(worst_p2, abs(relative_entropy_direct(power2(), A, B).value - hs_norm(A.matrix - B.matrix) ** 2))
    worst_cl = 0.0
    for i in range(100):
        rng = np.random.default_rng(8000 + i)
        n = 1 + i % 6
        U = random_unitary(n, rng)
        a, b = rng.uniform(0.02, 0.98, n), rng.uniform(0.02, 0.98, n)
        H = relative_entropy_direct(fermionic(), U @ np.diag(a) @ U.conj().T, U @ np.diag(b) @ U.conj().T).value
        worst_cl = max(worst_cl, abs(H - binary_relative_entropy(a, b)))
    example = relative_entropy_direct(fermionic(), np.diag([0.3, 0.7]), np.diag([0.5, 0.5])).value
    oracle = binary_relative_entropy([0.3, 0.7], [0.5, 0.5])
    ok = worst_p2 <= 1e-10 and worst_cl <= 1e-10 and abs(example - oracle) <= 1e-7
    report(7, ok, f"power2 vs hs_norm^2 {worst_p2:.2e}, commuting vs classical {worst_cl:.2e} (<= 1e-10), "
                  f"diag example {example:.10f} vs oracle {oracle:.10f}")


def test_criterion_8_resolvent_identity_and_integrability():
    grid = [(x, lam) for x in np.linspace(0.05, 0.95, 10) for lam in np.linspace(-0.95, 0.95, 10)]
    worst = max(verify_resolvent_identity(x, lam) for x, lam in grid)
    r = integrability_diagnostics(fermionic())
    target = (1 + math.log(2)) / 4
    log_ok = abs(r.log_integral_upper - target) <= 1e-9 and abs(r.log_integral_lower - target) <= 1e-9
    inv_ok = r.divergent("inverse_integral_upper") and r.divergent("inverse_integral_lower")
    report(8, worst <= 1e-9 and log_ok and inv_ok,
           f"identity deviation {worst:.2e} on 10x10 grid with lam = +-0.95 (<= 1e-9); "
           f"log integral {r.log_integral_upper:.10f} vs {target:.10f}; inverse integrals divergent={inv_ok}")


def test_criterion_9_integrand_positivity(triangle):
    _, samples, _ = triangle
    ok = samples["min"] >= -1e-12 and samples["excess"] <= 1e-9
    report(9, ok, f"{samples['count']} samples, min trace {samples['min']:.2e} (>= -1e-12), "
                  f"max trace - bound {samples['excess']:.2e} (<= 1e-9)")
