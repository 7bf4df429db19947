import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relentropy.errors import DomainError, ValidationError
from relentropy.hermitian import apply_function, random_unitary
from relentropy.loewner import (
    LoewnerMeasure,
    PhiSpec,
    atom,
    bosonic,
    builtin,
    chebyshev_grid,
    check_rep_consistency,
    eval_phi_prime_rep,
    eval_phi_rep,
    fermionic,
    from_representation,
    integrability_diagnostics,
    nonmonotone_quartic,
    power2,
    prime_kernel,
    primitive_kernel,
    spec_from_dict,
    uniform,
)

from conftest import seeds


def rep_prime(spec, x):
    return np.array([eval_phi_prime_rep(spec, v) for v in x])


def rep_phi(spec, x):
    return np.array([eval_phi_rep(spec, v) for v in x])

MONOTONE = [fermionic(), bosonic(), power2(), atom(0.5), atom(-0.5)]
ids = [s.name for s in MONOTONE]


def test_phi_prime_examples():
    assert eval_phi_prime_rep(power2(), 0.3) == pytest.approx(0.6, abs=1e-14)
    assert eval_phi_prime_rep(fermionic(), 0.25) == pytest.approx(math.log(1 / 3), abs=1e-9)


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_symmetry_point(spec):
    assert eval_phi_prime_rep(spec, 0.5) == pytest.approx(spec.a, abs=1e-14)
    assert eval_phi_rep(spec, 0.5) == pytest.approx(spec.a / 2 + spec.c, abs=1e-14)


def test_phi_examples():
    assert eval_phi_rep(fermionic(), 0.25) == pytest.approx(0.25 * math.log(0.25) + 0.75 * math.log(0.75), abs=1e-9)
    assert eval_phi_rep(power2(), 0.8) == pytest.approx(0.64, abs=1e-14)


def test_bosonic_coefficients():
    b = bosonic()
    assert (b.a, b.b) == pytest.approx((-math.log(3), 2 / 3))
    x = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(rep_prime(b, x), np.log(x / (1 + x)), atol=1e-9)


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_rep_consistency(spec):
    rep = check_rep_consistency(spec, 101, 1e-8)
    assert rep.passed, rep


def test_power2_exact():
    rep = check_rep_consistency(power2())
    assert rep.max_prime_deviation <= 1e-14 and rep.max_phi_deviation <= 1e-14


def test_corrupted_b_fails_consistency():
    good = fermionic()
    bad = PhiSpec("fermionic", good.phi, good.phi_prime, a=0.0, b=2.1, c=good.c, measure=good.measure,
                  discontinuous_at_zero=True, discontinuous_at_one=True)
    rep = check_rep_consistency(bad)
    assert not rep.passed and rep.max_prime_deviation > 1e-3


def test_negative_b_rejected():
    with pytest.raises(ValidationError, match="b"):
        from_representation("neg", 0.0, -1.0, LoewnerMeasure.dirac(0.0))


def test_measure_mass_validated():
    with pytest.raises(ValidationError):
        LoewnerMeasure(atoms=((0.0, 0.5),))
    with pytest.raises(ValidationError):
        LoewnerMeasure(atoms=((1.0, 1.0),))


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_mass_is_one(spec):
    assert spec.measure.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_builtin_names():
    assert builtin("atom(-0.25)").measure.atoms[0][0] == -0.25
    assert builtin("quartic").operator_monotone_derivative is False
    with pytest.raises(ValidationError):
        builtin("nope")
    with pytest.raises(ValidationError):
        builtin("atom(1.5)")


def test_flags():
    assert fermionic().discontinuous_at_zero and fermionic().discontinuous_at_one
    assert bosonic().discontinuous_at_zero and not bosonic().discontinuous_at_one
    assert not power2().discontinuous_at_zero


def test_domain_error_at_flagged_boundary():
    with pytest.raises(DomainError):
        eval_phi_prime_rep(fermionic(), 0.0)
    with pytest.raises(DomainError):
        eval_phi_prime_rep(bosonic(), 0.0)
    assert np.isfinite(eval_phi_prime_rep(bosonic(), 1.0))


def test_primitive_kernel_series_matches_closed_form():
    x = np.linspace(0.01, 0.99, 9)
    s = 2 * x - 1
    lam = 2e-4
    exact = s / lam + np.log1p(-lam * s) / lam**2
    np.testing.assert_allclose(primitive_kernel(lam, x), exact, rtol=1e-7)
    np.testing.assert_allclose(primitive_kernel(5e-5, x), -s**2 / 2 * (1 + 2 * 5e-5 * s / 3), rtol=1e-8)


def test_prime_kernel():
    assert prime_kernel(0.5, 0.25) == pytest.approx(-0.5 / 1.25)


def test_chebyshev_grid_bounds():
    g = chebyshev_grid(101, 0.02, 0.98)
    assert len(g) == 101 and g.min() >= 0.02 and g.max() <= 0.98


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_rep_strictly_increasing(spec):
    x = np.linspace(0.01, 0.99, 60)
    assert np.all(np.diff(rep_prime(spec, x)) > 0)


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_primitive_derivative(spec):
    x = np.linspace(0.1, 0.9, 9)
    h = 1e-5
    fd = (rep_phi(spec, x + h) - rep_phi(spec, x - h)) / (2 * h)
    np.testing.assert_allclose(fd, rep_prime(spec, x), atol=1e-6)


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
@given(seed=seeds, n=st.integers(2, 3))
def test_matrix_monotone_spot_check(spec, seed, n):
    rng = np.random.default_rng(seed)
    U = random_unitary(n, rng)
    A = U @ np.diag(rng.uniform(0.05, 0.6, n)) @ U.conj().T
    V = random_unitary(n, rng)
    B = A + V @ np.diag(rng.uniform(0.0, 0.3, n)) @ V.conj().T
    if np.linalg.eigvalsh(B).max() >= 0.95:
        return
    D = apply_function(spec.phi_prime, B) - apply_function(spec.phi_prime, A)
    assert np.linalg.eigvalsh(0.5 * (D + D.conj().T)).min() >= -1e-9


def test_quartic_is_not_operator_monotone():
    # x^3 fails on a 2x2 pair with A <= B
    A = np.array([[1.0, 1.0], [1.0, 1.0]]) * 0.3
    B = np.array([[0.7, 0.3], [0.3, 0.35]])
    assert np.linalg.eigvalsh(B - A).min() >= 0
    D = apply_function(nonmonotone_quartic().phi_prime, B) - apply_function(nonmonotone_quartic().phi_prime, A)
    assert np.linalg.eigvalsh(D).min() < 0


def test_integrability_fermionic():
    r = integrability_diagnostics(fermionic())
    assert r.log_integral_upper == pytest.approx((1 + math.log(2)) / 4, abs=1e-9)
    assert r.log_integral_lower == pytest.approx((1 + math.log(2)) / 4, abs=1e-9)
    assert r.divergent("inverse_integral_upper") and r.divergent("inverse_integral_lower")


def test_integrability_power2_and_bosonic():
    r = integrability_diagnostics(power2())
    assert (r.log_integral_upper, r.log_integral_lower, r.inverse_integral_upper, r.inverse_integral_lower) == (0, 0, 0, 0)
    b = integrability_diagnostics(bosonic())
    assert b.log_integral_upper == 0 and b.inverse_integral_upper == 0
    assert b.divergent("inverse_integral_lower") and not b.divergent("log_integral_lower")
    # density 3/2 on [-1, -1/2]: (3/2) int_0^{1/2} -ln d dd = (3/4)(1 + ln 2)
    assert b.log_integral_lower == pytest.approx(0.75 * (1 + math.log(2)), abs=1e-9)


@pytest.mark.parametrize("spec", MONOTONE, ids=ids)
def test_serialisation_round_trip(spec):
    back = spec_from_dict(json.loads(json.dumps(spec.to_dict())))
    assert back.to_dict() == spec.to_dict()
    x = np.linspace(0.05, 0.95, 5)
    np.testing.assert_allclose(back.phi_prime(x), spec.phi_prime(x), atol=1e-12)


def test_custom_spec_from_dict_uses_representation():
    d = {"name": "custom", "a": 0.5, "b": 1.0, "c": 0.0, "discontinuous_at_zero": False,
         "discontinuous_at_one": False, "atoms": [[0.2, 0.5]],
         "densities": [{"kind": "uniform", "interval": [-0.5, 0.5], "height": 0.5}]}
    spec = spec_from_dict(d)
    assert check_rep_consistency(spec).passed
    assert spec.phi_prime(0.5) == pytest.approx(0.5)


def test_spec_from_dict_negative_b():
    d = fermionic().to_dict()
    d["b"] = -1.0
    with pytest.raises(ValidationError):
        spec_from_dict(d)


def test_spec_from_dict_missing_field():
    d = fermionic().to_dict()
    del d["a"]
    with pytest.raises(ValidationError, match="a"):
        spec_from_dict(d)


def test_uniform_density_mass():
    assert uniform(-1, -1 / 3).mass() == pytest.approx(1.0)
