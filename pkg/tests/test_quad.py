import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relentropy.errors import QuadratureError, ValidationError
from relentropy.loewner import LoewnerMeasure, fermionic, uniform
from relentropy.quad import (
    adaptive_panels,
    graded_breakpoints,
    integrate_halfline,
    integrate_interval,
    integrate_measure,
    verify_resolvent_identity,
)


def test_polynomial_is_exact_on_one_panel():
    res = adaptive_panels(lambda x: x**31, [0.0, 1.0])
    assert res.value == pytest.approx(1 / 32, abs=1e-15)


def test_endpoint_singularities():
    # a sqrt(h) panel error makes the halving estimate low by 1/(1 - 2^-1/2) ~ 3.4x at worst
    assert integrate_interval(lambda x: x**-0.5, 0.0, 1.0, tol=1e-6).value == pytest.approx(2.0, abs=3.5e-6)
    assert integrate_interval(np.log, 0.0, 1.0).value == pytest.approx(-1.0, abs=1e-9)


def test_matrix_valued_integrand():
    res = integrate_interval(lambda x: np.stack([x, x**2], axis=-1)[:, :, None] * np.ones((1, 1, 2)), 0.0, 1.0)
    np.testing.assert_allclose(res.value, [[0.5, 0.5], [1 / 3, 1 / 3]], atol=1e-14)


def test_graded_breakpoints_refine_toward_ends():
    bp = graded_breakpoints(0.0, 1.0, True, False, levels=3)
    np.testing.assert_allclose(bp, [0.0, 0.0625, 0.125, 0.25, 0.5, 1.0])


def test_nonintegrable_raises():
    with pytest.raises(QuadratureError) as exc:
        integrate_interval(lambda x: 1.0 / x, 0.0, 1.0, max_depth=8)
    assert exc.value.error_estimate > 0


def test_empty_interval():
    with pytest.raises(ValidationError):
        integrate_interval(np.sin, 1.0, 1.0)


def test_total_mass():
    assert integrate_measure(lambda x: np.ones_like(x), fermionic().measure).value == pytest.approx(1.0, abs=1e-14)


def test_odd_moment_vanishes():
    assert integrate_measure(lambda x: x, fermionic().measure).value == pytest.approx(0.0, abs=1e-14)


def test_log_endpoint_integral_closed_form():
    f = lambda lam: -np.log1p(-lam) * 0.5
    value = integrate_interval(f, 0.5, 1.0).value
    assert value == pytest.approx((1 + math.log(2)) / 4, abs=1e-9)


def test_atoms_summed_exactly():
    mu = LoewnerMeasure(atoms=((0.25, 0.5), (-0.5, 0.5)))
    assert integrate_measure(lambda x: x**2, mu).value == pytest.approx(0.5 * 0.0625 + 0.5 * 0.25, abs=1e-16)


def test_halfline_examples():
    assert integrate_halfline(lambda t: (1 + t) ** -2).value == pytest.approx(1.0, abs=1e-9)
    assert integrate_halfline(lambda t: (1.7 + t) ** -2).value == pytest.approx(1 / 1.7, abs=1e-9)


def test_halfline_log_formula():
    res = integrate_halfline(lambda t: 1 / (1 + t) - 1 / (0.4 + t))
    assert res.value == pytest.approx(math.log(0.4), abs=1e-9)


def test_halfline_rejects_slow_decay():
    with pytest.raises(ValidationError):
        integrate_halfline(lambda t: 1 / (1 + t), decay_order=1)


def test_resolvent_identity_examples():
    assert verify_resolvent_identity(0.5, 0.3) <= 1e-12
    assert verify_resolvent_identity(0.2, 0.5) <= 1e-10
    assert verify_resolvent_identity(0.9, -0.95) <= 1e-9


def test_resolvent_identity_grid():
    worst = max(verify_resolvent_identity(x, lam)
                for x in np.linspace(0.05, 0.95, 10) for lam in np.linspace(-0.9, 0.9, 10))
    assert worst <= 1e-9


@given(st.floats(0.5, 5.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_measure_integration_is_linear(p, alpha, beta):
    mu = fermionic().measure
    f = lambda x: np.exp(p * x)
    g = lambda x: 1 / (2 - x)
    tol = 1e-10
    lhs = integrate_measure(lambda x: alpha * f(x) + beta * g(x), mu, tol).value
    rhs = alpha * integrate_measure(f, mu, tol).value + beta * integrate_measure(g, mu, tol).value
    assert abs(lhs - rhs) <= 2 * tol * max(1.0, abs(alpha) + abs(beta))


@given(st.floats(-0.99, 0.99))
def test_refinement_stays_within_error_estimate(shift):
    mu = fermionic().measure
    f = lambda lam: -np.log1p(-lam * 0.999) + 1 / (1.5 - shift * lam)
    coarse = integrate_measure(f, mu, 1e-6)
    fine = integrate_measure(f, mu, 1e-13)
    assert abs(coarse.value - fine.value) <= coarse.error_estimate + 1e-13


def test_bit_identical_reruns():
    f = lambda t: np.stack([(1 + t) ** -2, (0.3 + t) ** -3], axis=-1)
    a, b = integrate_halfline(f), integrate_halfline(f)
    np.testing.assert_array_equal(a.value, b.value)
