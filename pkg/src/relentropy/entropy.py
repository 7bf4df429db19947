"""Relative entropies ``H(A, B) = tr[phi(A) - phi(B) - phi'(B)(A - B)]``.

Three independent evaluations are provided:

* :func:`relative_entropy_direct` uses ``phi'(B)`` through the functional calculus;
* :func:`relative_entropy_gateaux` replaces ``phi'(B)(A - B)`` by the
  directional derivative of ``phi`` at ``B`` (divided differences);
* :func:`relative_entropy_integral` integrates ``tr[R(B) Q R(A) Q R(B)]``
  with ``R(X) = (1 + lam(1 - 2X) + t)^-1`` over ``t >= 0`` and the Loewner
  measure.

When ``phi'`` blows up at 0 or 1 and ``B`` has that eigenvalue, the entropy is
``+inf`` unless ``A`` agrees with ``B`` on the eigenspace, in which case the
trace is taken on the orthogonal complement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quad
from .errors import ConsistencyError, SingularCaseError, ValidationError
from .hermitian import (
    StateOperator,
    apply_function,
    as_hermitian,
    as_state,
    hs_norm,
    restrict_to_range,
)
from .loewner import PhiSpec

BOUNDARY_TOL = 1e-10
DEGENERACY_TOL = 1e-7
NONNEG_TOL = 1e-9
INTEGRAND_TOL = 1e-12


class Reason(str, enum.Enum):
    KERNEL_MISMATCH_AT_ZERO = "KernelMismatchAtZero"
    KERNEL_MISMATCH_AT_ONE = "KernelMismatchAtOne"
    NOT_HILBERT_SCHMIDT = "NotHilbertSchmidt"


@dataclass(frozen=True)
class EntropyValue:
    """A non-negative entropy, or ``+inf`` together with the reason.

    Compares and sorts through ``float(value)``, so every finite value is
    below ``+inf`` and two infinities are equal.
    """

    value: float
    reason: Reason | None = None

    @classmethod
    def infinite(cls, reason: Reason) -> "EntropyValue":
        return cls(math.inf, reason)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self):
        return float(self.value)

    def __lt__(self, other):
        return float(self) < float(other)

    def __le__(self, other):
        return float(self) <= float(other)

    def to_json(self):
        """JSON-safe value: a float, or the string ``"inf"``."""
        return self.value if self.is_finite else "inf"


class Boundary(str, enum.Enum):
    NO_EIGENVALUE = "NoEigenvalue"
    AGREEMENT = "EigenvalueWithAgreement"
    MISMATCH = "EigenvalueWithMismatch"


@dataclass(frozen=True)
class SingularCase:
    """Per-boundary classification; ``None`` where ``phi'`` is continuous."""

    at_zero: Boundary | None
    at_one: Boundary | None
    kernel_dim_zero: int
    kernel_dim_one: int
    mismatch_norm_zero: float
    mismatch_norm_one: float
    kernel_zero: np.ndarray
    kernel_one: np.ndarray

    @property
    def reason(self) -> Reason | None:
        if self.at_zero is Boundary.MISMATCH:
            return Reason.KERNEL_MISMATCH_AT_ZERO
        if self.at_one is Boundary.MISMATCH:
            return Reason.KERNEL_MISMATCH_AT_ONE
        return None

    @property
    def has_mismatch(self) -> bool:
        return self.reason is not None

    @property
    def has_agreement(self) -> bool:
        return Boundary.AGREEMENT in (self.at_zero, self.at_one)

    def to_dict(self) -> dict:
        return {
            "at_zero": None if self.at_zero is None else self.at_zero.value,
            "at_one": None if self.at_one is None else self.at_one.value,
            "kernel_dim_zero": self.kernel_dim_zero,
            "kernel_dim_one": self.kernel_dim_one,
            "mismatch_norm_zero": self.mismatch_norm_zero,
            "mismatch_norm_one": self.mismatch_norm_one,
        }


def _pair(A, B):
    A, B = as_state(A), as_state(B)
    if A.dim != B.dim:
        raise ValidationError(f"dimension mismatch: A is {A.dim}x{A.dim}, B is {B.dim}x{B.dim}")
    return A, B


def classify_singular_case(spec: PhiSpec, A, B, tol: float = BOUNDARY_TOL) -> SingularCase:
    A, B = _pair(A, B)
    Q = A.matrix - B.matrix
    beta, U = B.eigenvalues, B.eigenvectors
    out = {}
    for key, flagged, target in (("zero", spec.discontinuous_at_zero, 0.0),
                                 ("one", spec.discontinuous_at_one, 1.0)):
        V = U[:, np.abs(beta - target) <= tol] if flagged else U[:, :0]
        if not flagged:
            status, norm = None, 0.0
        elif V.shape[1] == 0:
            status, norm = Boundary.NO_EIGENVALUE, 0.0
        else:
            norm = float(np.linalg.norm(Q @ V, 2))
            status = Boundary.MISMATCH if norm > tol else Boundary.AGREEMENT
        out[key] = (status, V, norm)
    return SingularCase(
        at_zero=out["zero"][0], at_one=out["one"][0],
        kernel_dim_zero=out["zero"][1].shape[1], kernel_dim_one=out["one"][1].shape[1],
        mismatch_norm_zero=out["zero"][2], mismatch_norm_one=out["one"][2],
        kernel_zero=out["zero"][1], kernel_one=out["one"][1],
    )


def reduce_to_complement(case: SingularCase, A: StateOperator, B: StateOperator):
    """Restrict ``A`` and ``B`` off the boundary eigenspaces where they agree.

    Returns ``None`` when nothing is left (the entropy is then 0).
    """
    if not case.has_agreement:
        return A, B
    V = np.column_stack([case.kernel_zero, case.kernel_one])
    P = np.eye(A.dim) - V @ V.conj().T
    if V.shape[1] == A.dim:
        return None
    return restrict_to_range(A, P), restrict_to_range(B, P)


def _sum_phi(spec, X: StateOperator) -> float:
    return float(np.sum(spec.phi(X.eigenvalues)))


def _checked(value: float) -> EntropyValue:
    if value < -NONNEG_TOL:
        raise ConsistencyError(f"entropy evaluated to {value:.3e} < 0")
    return EntropyValue(float(value))


def _prepare(spec, A, B, tol):
    A, B = _pair(A, B)
    case = classify_singular_case(spec, A, B, tol)
    if case.has_mismatch:
        return case, None
    return case, reduce_to_complement(case, A, B)


def relative_entropy_direct(spec: PhiSpec, A, B, tol: float = BOUNDARY_TOL) -> EntropyValue:
    """``tr[phi(A) - phi(B) - phi'(B)(A - B)]`` by spectral functional calculus."""
    case, reduced = _prepare(spec, A, B, tol)
    if case.has_mismatch:
        return EntropyValue.infinite(case.reason)
    if reduced is None:
        return EntropyValue(0.0)
    A, B = reduced
    dphi_B = apply_function(spec.phi_prime, B, spec.derivative_domain)
    cross = np.real(np.sum(dphi_B * (A.matrix - B.matrix).T))
    return _checked(_sum_phi(spec, A) - _sum_phi(spec, B) - cross)


def divided_differences(f: Callable, fprime: Callable, x: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Matrix of first divided differences ``(f(x_i) - f(x_j)) / (x_i - x_j)``.

    Nearly equal pairs use ``f'`` at their midpoint.
    """
    x = np.asarray(x, dtype=float)
    fx = np.asarray(f(x), dtype=float)
    dx = x[:, None] - x[None, :]
    close = np.abs(dx) < degeneracy_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (fx[:, None] - fx[None, :]) / np.where(close, 1.0, dx)
        mid = 0.5 * (x[:, None] + x[None, :])
        out[close] = np.asarray(fprime(mid[close]), dtype=float)
    return out


def _boundary_indices(spec, beta, tol):
    idx = np.zeros(beta.shape, dtype=bool)
    if spec.discontinuous_at_zero:
        idx |= np.abs(beta) <= tol
    if spec.discontinuous_at_one:
        idx |= np.abs(beta - 1.0) <= tol
    return idx


def _q_in_b_basis(spec, B, Q, tol):
    B = as_state(B)
    Q = as_hermitian(Q)
    if Q.shape != B.matrix.shape:
        raise ValidationError("B and Q have different shapes")
    U = B.eigenvectors
    Qt = U.conj().T @ Q @ U
    bnd = _boundary_indices(spec, B.eigenvalues, tol)
    if np.any(bnd):
        norm = float(np.linalg.norm(Qt[:, bnd], 2))
        if norm > tol:
            raise SingularCaseError(
                f"B has a boundary eigenvalue where phi' is singular and |Q psi| = {norm:.3e}"
            )
    return B, U, Qt, bnd


def gateaux_derivative_spectral(spec: PhiSpec, B, Q, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """``d/da phi(B + a Q)`` at ``a = 0``: divided differences of ``phi`` times ``Q`` in ``B``'s eigenbasis.

    On boundary eigenspaces where ``phi'`` is infinite (and ``Q`` vanishes)
    the derivative is zero.
    """
    B, U, Qt, bnd = _q_in_b_basis(spec, B, Q, tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = divided_differences(spec.phi, spec.phi_prime, B.eigenvalues)
    dd[~np.isfinite(dd)] = 0.0
    Dt = dd * Qt
    Dt[bnd, :] = 0.0
    Dt[:, bnd] = 0.0
    D = U @ Dt @ U.conj().T
    return 0.5 * (D + D.conj().T)


def relative_entropy_gateaux(spec: PhiSpec, A, B, tol: float = BOUNDARY_TOL) -> EntropyValue:
    """``tr[phi(A) - phi(B) - d/da phi(aA + (1-a)B)|_0]``."""
    case, reduced = _prepare(spec, A, B, tol)
    if case.has_mismatch:
        return EntropyValue.infinite(case.reason)
    if reduced is None:
        return EntropyValue(0.0)
    A, B = reduced
    D = gateaux_derivative_spectral(spec, B, A.matrix - B.matrix, tol)
    return _checked(_sum_phi(spec, A) - _sum_phi(spec, B) - float(np.trace(D).real))


def gateaux_derivative_resolvent(spec: PhiSpec, B, Q, tol_lambda: float = quad.DEFAULT_TOL,
                                 tol_t: float = quad.DEFAULT_TOL, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Directional derivative from the resolvent integral form.

    In ``B``'s eigenbasis, with ``c_i = 1 - 2 beta_i`` and ``p_i = 1 + lam c_i``,

        (2/lam) [Q - int R Q R dt]_ij = Q_ij int 2 [(c_i + c_j)(1+t) + lam c_i c_j]
                                                 / ((1+t)^2 (p_i+t)(p_j+t)) dt,

    which has no singularity at ``lam = 0`` and is what gets integrated.
    """
    B, U, Qt, bnd = _q_in_b_basis(spec, B, Q, tol)
    n = Qt.shape[0]
    keep = ~bnd
    if spec.b == 0 or not np.any(keep):
        Dt = spec.a * Qt
    else:
        c = 1.0 - 2.0 * B.eigenvalues[keep]
        ci, cj = c[:, None], c[None, :]

        def bracket(lams):
            rows = []
            for lam in np.atleast_1d(lams):
                pi, pj = 1.0 + lam * ci, 1.0 + lam * cj

                def g(t):
                    t = t[:, None, None]
                    return 2.0 * ((ci + cj) * (1.0 + t) + lam * ci * cj) / ((1.0 + t) ** 2 * (pi + t) * (pj + t))

                rows.append(quad.integrate_halfline(g, tol_t, decay_order=3).value)
            return np.array(rows)

        kernel = quad.integrate_measure(bracket, spec.measure, tol_lambda).value
        Dt = np.zeros((n, n), dtype=complex)
        sub = np.ix_(keep, keep)
        Dt[sub] = Qt[sub] * (spec.a - 0.5 * spec.b * kernel)
    D = U @ Dt @ U.conj().T
    return 0.5 * (D + D.conj().T)


def relative_entropy_integral(spec: PhiSpec, A, B, tol_lambda: float = quad.DEFAULT_TOL,
                              tol_t: float = quad.DEFAULT_TOL, tol: float = BOUNDARY_TOL,
                              on_sample: Callable | None = None) -> EntropyValue:
    """``2b int dmu(lam) int_0^inf tr[R(B) Q R(A) Q R(B)] dt``.

    The trace is evaluated from both eigen-decompositions as
    ``sum_ik |<b_i|Q|a_k>|^2 / ((p_i + t)^2 (q_k + t))``.  Any sampled trace
    below ``-1e-12`` raises :class:`ConsistencyError`.  ``on_sample``, if
    given, is called as ``on_sample(lams, ts, traces, bounds)`` with the
    ``(lam, t)`` grid of every evaluation and the bound
    ``(1 - |lam| + t)^-3 ||Q||_2^2``.
    """
    if not spec.operator_monotone_derivative:
        raise ValidationError(f"{spec.name!r} has no Loewner representation")
    case, reduced = _prepare(spec, A, B, tol)
    if case.has_mismatch:
        return EntropyValue.infinite(case.reason)
    if reduced is None or spec.b == 0:
        return EntropyValue(0.0)
    A, B = reduced
    Q = A.matrix - B.matrix
    W = np.abs(B.eigenvectors.conj().T @ Q @ A.eigenvectors) ** 2
    cB = 1.0 - 2.0 * B.eigenvalues
    cA = 1.0 - 2.0 * A.eigenvalues
    q_norm2 = hs_norm(Q) ** 2

    def over_lambda(lams):
        lams = np.atleast_1d(lams)
        p = 1.0 + lams[:, None] * cB[None, :]
        q = 1.0 + lams[:, None] * cA[None, :]

        def over_t(ts):
            X = 1.0 / (p[None, :, :] + ts[:, None, None]) ** 2
            Y = 1.0 / (q[None, :, :] + ts[:, None, None])
            vals = np.einsum("tli,ik,tlk->tl", X, W, Y)
            if vals.size and vals.min() < -INTEGRAND_TOL:
                raise ConsistencyError(f"negative trace {vals.min():.3e} in resolvent integrand")
            if on_sample is not None:
                bound = (1.0 - np.abs(lams)[None, :] + ts[:, None]) ** -3 * q_norm2
                on_sample(lams, ts, vals, bound)
            return vals

        return quad.integrate_halfline(over_t, tol_t, decay_order=3).value

    res = quad.integrate_measure(over_lambda, spec.measure, tol_lambda)
    return _checked(2.0 * spec.b * float(res.value))


@dataclass(frozen=True)
class TraceIdentityReport:
    lhs: float
    rhs: float
    difference: float
    trace_derivative: float
    trace_phi_prime_q: float


def theorem4_check(spec: PhiSpec, A, B, tol: float = BOUNDARY_TOL) -> TraceIdentityReport:
    """Compare the derivative form of the entropy with the ``phi'(B)(A - B)`` form.

    ``lhs`` uses the Gateaux derivative, ``rhs`` the functional calculus; the
    report also carries both traces ``tr D`` and ``tr phi'(B) Q`` separately.
    """
    case, reduced = _prepare(spec, A, B, tol)
    if case.has_mismatch:
        raise SingularCaseError("trace identity is not defined when the entropy is infinite")
    if reduced is None:
        return TraceIdentityReport(0.0, 0.0, 0.0, 0.0, 0.0)
    A, B = reduced
    Q = A.matrix - B.matrix
    tr_d = float(np.trace(gateaux_derivative_spectral(spec, B, Q, tol)).real)
    dphi_B = apply_function(spec.phi_prime, B, spec.derivative_domain)
    tr_pq = float(np.real(np.sum(dphi_B * Q.T)))
    base = _sum_phi(spec, A) - _sum_phi(spec, B)
    lhs, rhs = base - tr_d, base - tr_pq
    return TraceIdentityReport(lhs, rhs, abs(lhs - rhs), tr_d, tr_pq)


def klein_ratio(spec: PhiSpec, A, B, tol: float = BOUNDARY_TOL) -> float | None:
    """``H(A, B) / tr[(B^-2 + (1 - B)^-2)(A - B)^2]``; ``None`` if ``B`` touches 0 or 1.

    Returns 0 when ``A == B`` (both numerator and denominator vanish).
    """
    A, B = _pair(A, B)
    beta = B.eigenvalues
    if beta[0] <= tol or beta[-1] >= 1.0 - tol:
        return None
    Q = A.matrix - B.matrix
    weight = apply_function(lambda x: x**-2 + (1.0 - x) ** -2, B)
    denom = float(np.real(np.trace(weight @ Q @ Q)))
    H = relative_entropy_direct(spec, A, B, tol)
    if denom == 0.0:
        return 0.0
    return float(H.value) / denom
