"""Adaptive Gauss-Legendre quadrature on graded panels.

Two entry points matter to the rest of the package:

* :func:`integrate_measure` integrates over a Loewner measure (atoms summed
  exactly, densities on panels graded dyadically toward their endpoints);
* :func:`integrate_halfline` integrates over ``t in [0, inf)`` after the
  substitution ``t = u / (1 - u)``.

Integrands are vectorised: they receive a 1-d array of nodes and return an
array whose leading axis runs over the nodes.  Trailing axes (vector or matrix
valued integrands) are allowed; convergence is then judged on the largest
component.  Panels are reduced in a fixed order so repeated runs agree bit for
bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import QuadratureError, ValidationError

GL_ORDER = 16
DEFAULT_TOL = 1e-9
MAX_DEPTH = 40
INITIAL_GRADING = 4

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureResult:
    value: object
    error_estimate: float
    evaluations: int

    def __float__(self):
        return float(self.value)


def _panel_values(f, a, b):
    """Gauss-Legendre sums on every panel ``[a_i, b_i]``; returns shape ``(m, *S)``."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    m = a.shape[0]
    fx = fx.reshape((m, GL_ORDER) + fx.shape[1:])
    w = (half[:, None] * _WEIGHTS[None, :]).reshape((m, GL_ORDER) + (1,) * (fx.ndim - 2))
    return np.sum(fx * w, axis=1)


def _max_abs(v):
    v = np.abs(v)
    return v.reshape(v.shape[0], -1).max(axis=1) if v.ndim > 1 else v


def adaptive_panels(f: Callable, breakpoints, tol: float = DEFAULT_TOL,
                    max_depth: int = MAX_DEPTH) -> QuadratureResult:
    """Globally adaptive bisection of the panels between ``breakpoints``.

    The error estimate of a panel is the change between its 16-point value and
    the sum over its two halves.  Every panel whose estimate exceeds
    ``tol / (2 n)`` is bisected until the summed estimate drops below ``tol``.
    """
    bp = np.asarray(breakpoints, dtype=float)
    a, b = bp[:-1].copy(), bp[1:].copy()
    depth = np.zeros(a.shape[0], dtype=int)
    whole = _panel_values(f, a, b)
    evals = a.shape[0] * GL_ORDER
    while True:
        mid = 0.5 * (a + b)
        left = _panel_values(f, a, mid)
        right = _panel_values(f, mid, b)
        evals += 2 * a.shape[0] * GL_ORDER
        refined = left + right
        err = _max_abs(whole - refined)
        total_err = float(np.sum(err))
        if total_err <= tol:
            return QuadratureResult(np.sum(refined, axis=0), total_err, evals)
        split = err > tol / (2 * a.shape[0])
        if np.any(depth[split] >= max_depth):
            raise QuadratureError(
                f"no convergence after {max_depth} bisections (error estimate {total_err:.3e} > {tol:.3e})",
                estimate=np.sum(refined, axis=0),
                error_estimate=total_err,
            )
        keep = ~split
        # children of a split panel inherit their 16-point values from `left`/`right`
        na = np.concatenate([a[keep], a[split], mid[split]])
        nb = np.concatenate([b[keep], mid[split], b[split]])
        nw = np.concatenate([whole[keep], left[split], right[split]])
        nd = np.concatenate([depth[keep], depth[split] + 1, depth[split] + 1])
        order = np.argsort(na, kind="stable")
        a, b, whole, depth = na[order], nb[order], nw[order], nd[order]


def graded_breakpoints(lo: float, hi: float, grade_lo: bool = True, grade_hi: bool = True,
                       levels: int = INITIAL_GRADING) -> np.ndarray:
    """Breakpoints with panels halving in width toward the graded ends."""
    mid = 0.5 * (lo + hi)
    pts = [lo, mid, hi]
    half = 0.5 * (hi - lo)
    for k in range(1, levels + 1):
        d = half * 2.0 ** -k
        if grade_lo:
            pts.append(lo + d)
        if grade_hi:
            pts.append(hi - d)
    return np.unique(np.array(pts))


def integrate_interval(f: Callable, lo: float, hi: float, tol: float = DEFAULT_TOL,
                       grade=(True, True), max_depth: int = MAX_DEPTH) -> QuadratureResult:
    if not hi > lo:
        raise ValidationError(f"empty interval [{lo}, {hi}]")
    return adaptive_panels(f, graded_breakpoints(lo, hi, *grade), tol, max_depth)


def integrate_measure(f: Callable, measure, tol: float = DEFAULT_TOL,
                      max_depth: int = MAX_DEPTH) -> QuadratureResult:
    """Integrate ``f`` against a Loewner measure.

    ``measure`` needs ``atoms`` (``(location, weight)`` pairs) and
    ``densities`` (objects with ``lo``, ``hi`` and ``__call__``).  Atoms are
    summed exactly; each density panel set is graded toward both ends, which
    covers integrands that blow up like ``-ln(1 -+ lam)`` or ``(1 -+ lam)^-1``
    at the edges of ``[-1, 1]``.
    """
    value = 0.0
    err = 0.0
    evals = 0
    if measure.atoms:
        locs = np.array([loc for loc, _ in measure.atoms], dtype=float)
        wts = np.array([w for _, w in measure.atoms], dtype=float)
        fx = np.asarray(f(locs))
        value = value + np.tensordot(wts, fx, axes=(0, 0))
        evals += len(locs)
    dens = list(measure.densities)
    for d in dens:
        res = integrate_interval(lambda x, d=d: _weighted(f, d, x), d.lo, d.hi,
                                 tol / len(dens), max_depth=max_depth)
        value = value + res.value
        err += res.error_estimate
        evals += res.evaluations
    return QuadratureResult(value, err, evals)


def _weighted(f, density, x):
    fx = np.asarray(f(x))
    rho = np.asarray(density(x), dtype=float)
    return fx * rho.reshape(rho.shape + (1,) * (fx.ndim - 1))


def integrate_halfline(g: Callable, tol: float = DEFAULT_TOL, decay_order: float = 2,
                       max_depth: int = MAX_DEPTH) -> QuadratureResult:
    """Integrate ``g`` over ``[0, inf)`` for ``|g(t)| <= C (1 + t)^-decay_order``.

    Uses ``t = u / (1 - u)`` and graded panels toward ``u = 1``.
    """
    if decay_order < 2:
        raise ValidationError(f"decay_order must be >= 2, got {decay_order}")

    def h(u):
        one_minus = 1.0 - u
        gu = np.asarray(g(u / one_minus))
        jac = 1.0 / one_minus**2
        return gu * jac.reshape(jac.shape + (1,) * (gu.ndim - 1))

    return adaptive_panels(h, graded_breakpoints(0.0, 1.0, False, True), tol, max_depth)


def verify_resolvent_identity(x: float, lam: float, tol: float = DEFAULT_TOL) -> float:
    """Deviation between ``(1-2x)/(1+lam(1-2x))`` and its resolvent-integral form.

    The right-hand side is ``1/lam - (1/lam) int_0^inf (1 + lam(1-2x) + t)^-2 dt``.
    Below ``|lam| < 1e-4`` the exact limit of that expression is used.
    """
    s = 1.0 - 2.0 * x
    lhs = s / (1.0 + lam * s)
    if abs(lam) < 1e-4:
        # int_0^inf (p + t)^-2 dt = 1/p, so the right side equals s / (1 + lam s) exactly
        rhs = s / (1.0 + lam * s)
    else:
        p = 1.0 + lam * s
        res = integrate_halfline(lambda t: (p + t) ** -2, tol=tol * min(1.0, abs(lam)) / 10)
        rhs = 1.0 / lam - res.value / lam
    return abs(lhs - rhs)
