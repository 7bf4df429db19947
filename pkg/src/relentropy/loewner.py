"""Convex functions with operator-monotone derivative, via their Loewner measure.

With ``s = 2x - 1`` the derivative is written as

    phi'(x) = a + b * int s / (1 - lam s) dmu(lam)

for a probability measure ``mu`` on ``[-1, 1]``, and integrating in ``x``
gives the primitive

    phi(x) = a x + c - (b/2) * int [s/lam + ln(1 - lam s)/lam^2] dmu(lam).

The constant ``c`` is pinned by evaluating at ``x = 1/2`` where the integral
vanishes, so ``c = phi(1/2) - a/2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import xlogy

from . import quad
from .errors import DomainError, ValidationError
from .hermitian import Interval

MASS_TOL = 1e-10
SERIES_CUTOFF = 1e-4
DIVERGENCE_THRESHOLD = 1e6


@dataclass(frozen=True)
class Density:
    """Absolutely continuous part of a Loewner measure on ``[lo, hi]``.

    Either a constant ``height`` (the only kind that serialises) or an
    arbitrary non-negative callable.  ``singularity_exponent`` records how
    the density behaves at the ends, ``rho ~ dist^exponent``; it is
    informational, since panels are graded toward both ends regardless.
    """

    lo: float
    hi: float
    height: float | None = None
    func: Callable | None = field(default=None, compare=False)
    singularity_exponent: float = 0.0

    def __post_init__(self):
        if not (-1.0 <= self.lo < self.hi <= 1.0):
            raise ValidationError(f"density interval [{self.lo}, {self.hi}] not inside [-1, 1]")
        if (self.height is None) == (self.func is None):
            raise ValidationError("density needs exactly one of height or func")
        if self.height is not None and self.height < 0:
            raise ValidationError("density height must be non-negative")

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.height is not None:
            return np.full(lam.shape, float(self.height))
        return np.asarray(self.func(lam), dtype=float)

    def mass(self) -> float:
        if self.height is not None:
            return self.height * (self.hi - self.lo)
        return float(quad.integrate_interval(self, self.lo, self.hi, tol=1e-13).value)


def uniform(lo: float, hi: float, height: float | None = None) -> Density:
    """Constant density on ``[lo, hi]``; by default it carries unit mass."""
    return Density(lo, hi, height=1.0 / (hi - lo) if height is None else height)


@dataclass(frozen=True)
class LoewnerMeasure:
    atoms: tuple = ()
    densities: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(l), float(w)) for l, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "densities", tuple(self.densities))
        for loc, w in atoms:
            if not -1.0 < loc < 1.0:
                raise ValidationError(f"atom at {loc} must lie strictly inside (-1, 1)")
            if w <= 0:
                raise ValidationError(f"atom weight {w} must be positive")
        mass = self.total_mass()
        if abs(mass - 1.0) > MASS_TOL:
            raise ValidationError(f"measure has total mass {mass!r}, expected 1")

    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms) + sum(d.mass() for d in self.densities)

    @classmethod
    def dirac(cls, loc: float = 0.0) -> "LoewnerMeasure":
        return cls(atoms=((loc, 1.0),))


@dataclass(frozen=True)
class PhiSpec:
    """A convex ``phi`` on ``[0, 1]`` together with its derivative data.

    ``phi`` and ``phi_prime`` are vectorised callables.  ``measure`` is
    ``None`` for functions whose derivative is not operator monotone (then
    ``a``, ``b``, ``c`` carry no meaning).
    """

    name: str
    phi: Callable = field(compare=False, repr=False)
    phi_prime: Callable = field(compare=False, repr=False)
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    measure: LoewnerMeasure | None = None
    discontinuous_at_zero: bool = False
    discontinuous_at_one: bool = False
    operator_monotone_derivative: bool = True

    def __post_init__(self):
        if self.operator_monotone_derivative:
            if not self.b >= 0:
                raise ValidationError(f"coefficient b must be >= 0, got {self.b}")
            if self.measure is None:
                raise ValidationError("an operator-monotone derivative needs a Loewner measure")

    @property
    def derivative_domain(self) -> Interval:
        return Interval(0.0, 1.0, not self.discontinuous_at_zero, not self.discontinuous_at_one)

    def to_dict(self) -> dict:
        if self.measure is None:
            raise ValidationError(f"{self.name!r} has no Loewner representation to serialise")
        dens = []
        for d in self.measure.densities:
            if d.height is None:
                raise ValidationError("only uniform densities can be serialised")
            dens.append({"kind": "uniform", "interval": [d.lo, d.hi], "height": d.height})
        return {
            "name": self.name,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "discontinuous_at_zero": self.discontinuous_at_zero,
            "discontinuous_at_one": self.discontinuous_at_one,
            "atoms": [[l, w] for l, w in self.measure.atoms],
            "densities": dens,
        }


# -- integrands ------------------------------------------------------------


def prime_kernel(lam, x):
    """``s / (1 - lam s)`` with ``s = 2x - 1``."""
    s = 2.0 * x - 1.0
    return s / (1.0 - np.asarray(lam, dtype=float) * s)


def primitive_kernel(lam, x):
    """``s/lam + ln(1 - lam s)/lam^2``; a Taylor series replaces it near ``lam = 0``."""
    lam, s = np.broadcast_arrays(np.asarray(lam, dtype=float), 2.0 * np.asarray(x, dtype=float) - 1.0)
    out = np.empty(lam.shape)
    small = np.abs(lam) < SERIES_CUTOFF
    lb, sb = lam[~small], s[~small]
    with np.errstate(divide="ignore"):
        out[~small] = sb / lb + np.log1p(-lb * sb) / lb**2
    ls, ss = lam[small], s[small]
    # -sum_{k>=2} lam^(k-2) s^k / k
    out[small] = -sum(ls ** (k - 2) * ss**k / k for k in range(2, 9))
    return out


def eval_phi_prime_rep(spec: PhiSpec, x: float, tol: float = quad.DEFAULT_TOL) -> float:
    """``phi'(x)`` computed from ``(a, b, mu)`` by quadrature."""
    _require_rep(spec)
    if not spec.derivative_domain.contains(x):
        raise DomainError(f"{spec.name}: derivative is discontinuous at x={x}", x)
    if spec.b == 0:
        return float(spec.a)
    res = quad.integrate_measure(lambda lam: prime_kernel(lam, x), spec.measure, tol)
    return float(spec.a + spec.b * res.value)


def eval_phi_rep(spec: PhiSpec, x: float, tol: float = quad.DEFAULT_TOL) -> float:
    """``phi(x)`` from the primitive of the Loewner form, ``x`` in ``[0, 1]``."""
    _require_rep(spec)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]", x)
    if spec.b == 0:
        return float(spec.a * x + spec.c)
    res = quad.integrate_measure(lambda lam: primitive_kernel(lam, x), spec.measure, tol)
    return float(spec.a * x + spec.c - 0.5 * spec.b * res.value)


def _require_rep(spec):
    if spec.measure is None or not spec.operator_monotone_derivative:
        raise ValidationError(f"{spec.name!r} has no Loewner representation")


# -- catalogue ---------------------------------------------------------------


def _fermionic_phi(x):
    x = np.asarray(x, dtype=float)
    return xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)


def _fermionic_prime(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(x) - np.log1p(-x)


def _bosonic_phi(x):
    x = np.asarray(x, dtype=float)
    return xlogy(x, x) - (1.0 + x) * np.log1p(x)


def _bosonic_prime(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(x) - np.log1p(x)


def fermionic() -> PhiSpec:
    # ln((1+s)/(1-s)) = int_{-1}^{1} s/(1 - lam s) dlam  ->  b * (1/2) = 1
    return PhiSpec(
        "fermionic", _fermionic_phi, _fermionic_prime,
        a=0.0, b=2.0, c=-math.log(2.0),
        measure=LoewnerMeasure(densities=(uniform(-1.0, 1.0),)),
        discontinuous_at_zero=True, discontinuous_at_one=True,
    )


def bosonic() -> PhiSpec:
    # int_{-1}^{-1/3} s/(1 - lam s) dlam = ln 3 + ln((1+s)/(3+s)), density 3/2 has mass 1
    return PhiSpec(
        "bosonic", _bosonic_phi, _bosonic_prime,
        a=-math.log(3.0), b=2.0 / 3.0, c=float(_bosonic_phi(0.5)) + math.log(3.0) / 2,
        measure=LoewnerMeasure(densities=(uniform(-1.0, -1.0 / 3.0),)),
        discontinuous_at_zero=True,
    )


def power2() -> PhiSpec:
    return PhiSpec(
        "power2", lambda x: np.asarray(x, dtype=float) ** 2, lambda x: 2.0 * np.asarray(x, dtype=float),
        a=1.0, b=1.0, c=-0.25, measure=LoewnerMeasure.dirac(0.0),
    )


def atom(loc: float) -> PhiSpec:
    """``phi' = s / (1 - loc s)``: ``a = 0``, ``b = 1``, ``mu`` a point mass at ``loc``."""
    loc = float(loc)
    if not -1.0 < loc < 1.0:
        raise ValidationError(f"atom location {loc} must lie in (-1, 1)")

    def phi(x):
        return -0.5 * primitive_kernel(loc, x)

    def phi_prime(x):
        return prime_kernel(loc, np.asarray(x, dtype=float))

    return PhiSpec(f"atom({loc!r})", phi, phi_prime, a=0.0, b=1.0, c=0.0,
                   measure=LoewnerMeasure.dirac(loc))


def nonmonotone_quartic() -> PhiSpec:
    """``phi = x^4/4``: convex, but ``phi' = x^3`` is not operator monotone."""
    return PhiSpec(
        "quartic", lambda x: np.asarray(x, dtype=float) ** 4 / 4, lambda x: np.asarray(x, dtype=float) ** 3,
        operator_monotone_derivative=False,
    )


_ATOM_RE = re.compile(r"^atom\(\s*([-+0-9.eE]+)\s*\)$")


def builtin(name: str) -> PhiSpec:
    """Look up ``fermionic``, ``bosonic``, ``power2``, ``atom(<loc>)`` or ``quartic``."""
    simple = {"fermionic": fermionic, "bosonic": bosonic, "power2": power2,
              "quartic": nonmonotone_quartic}
    if name in simple:
        return simple[name]()
    m = _ATOM_RE.match(name.strip())
    if m:
        try:
            loc = float(m.group(1))
        except ValueError:
            raise ValidationError(f"bad atom location in {name!r}") from None
        return atom(loc)
    raise ValidationError(f"unknown phi {name!r}; expected fermionic, bosonic, power2, atom(<loc>) or quartic")


def from_representation(name: str, a: float, b: float, measure: LoewnerMeasure, c: float = 0.0,
                        discontinuous_at_zero: bool = False, discontinuous_at_one: bool = False) -> PhiSpec:
    """A spec whose ``phi`` and ``phi'`` are themselves evaluated from the representation."""
    spec = PhiSpec(name, None, None, a=a, b=b, c=c, measure=measure,
                   discontinuous_at_zero=discontinuous_at_zero, discontinuous_at_one=discontinuous_at_one)
    phi = np.vectorize(lambda x: eval_phi_rep(spec, float(x)), otypes=[float])

    def phi_prime(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.vectorize(
                lambda v: eval_phi_prime_rep(spec, float(v)) if spec.derivative_domain.contains(v)
                else (-np.inf if v <= 0 else np.inf),
                otypes=[float],
            )(x)
        return out

    return replace(spec, phi=phi, phi_prime=phi_prime)


def spec_from_dict(obj: dict) -> PhiSpec:
    """Rebuild a spec from :meth:`PhiSpec.to_dict` output.

    If ``name`` is a catalogue entry, ``phi`` and ``phi'`` come from the
    catalogue's closed forms so that a corrupted representation shows up as a
    consistency failure instead of being silently self-consistent.
    """
    if not isinstance(obj, dict):
        raise ValidationError("phi spec must be a JSON object")
    try:
        name = str(obj["name"])
        a, b = float(obj["a"]), float(obj["b"])
        c = float(obj.get("c", 0.0))
        flags = (bool(obj.get("discontinuous_at_zero", False)), bool(obj.get("discontinuous_at_one", False)))
        atoms = tuple((float(l), float(w)) for l, w in obj.get("atoms", []))
        dens = []
        for d in obj.get("densities", []):
            if d.get("kind") != "uniform":
                raise ValidationError(f"unsupported density kind {d.get('kind')!r}")
            lo, hi = (float(v) for v in d["interval"])
            dens.append(Density(lo, hi, height=float(d["height"])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed phi spec: missing or invalid field {exc}") from None
    if not b >= 0:
        raise ValidationError(f"coefficient b must be >= 0, got {b}")
    measure = LoewnerMeasure(atoms=atoms, densities=tuple(dens))
    try:
        ref = builtin(name)
    except ValidationError:
        ref = None
    if ref is not None and ref.measure is not None:
        return PhiSpec(name, ref.phi, ref.phi_prime, a=a, b=b, c=c, measure=measure,
                       discontinuous_at_zero=flags[0], discontinuous_at_one=flags[1])
    return from_representation(name, a, b, measure, c, *flags)


# -- diagnostics ---------------------------------------------------------------


@dataclass(frozen=True)
class RepConsistencyReport:
    max_prime_deviation: float
    max_phi_deviation: float
    tol: float
    grid_size: int

    @property
    def passed(self) -> bool:
        return self.max_prime_deviation <= self.tol and self.max_phi_deviation <= self.tol


def chebyshev_grid(n: int, lo: float = 0.02, hi: float = 0.98) -> np.ndarray:
    k = np.arange(n)
    return np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(np.pi * (2 * k + 1) / (2 * n)))


def check_rep_consistency(spec: PhiSpec, grid_size: int = 101, tol: float = 1e-8) -> RepConsistencyReport:
    """Largest deviation of the representation from the closed-form ``phi'`` and ``phi``."""
    _require_rep(spec)
    qtol = min(1e-11, tol / 100)
    xs = chebyshev_grid(grid_size)
    d_prime = max(abs(eval_phi_prime_rep(spec, x, qtol) - float(spec.phi_prime(x))) for x in xs)
    d_phi = max(abs(eval_phi_rep(spec, x, qtol) - float(spec.phi(x))) for x in xs)
    return RepConsistencyReport(float(d_prime), float(d_phi), tol, grid_size)


@dataclass(frozen=True)
class IntegrabilityReport:
    """Endpoint integrals of the measure; ``math.inf`` marks a divergent one."""

    log_integral_upper: float
    log_integral_lower: float
    inverse_integral_upper: float
    inverse_integral_lower: float

    def divergent(self, field_name: str) -> bool:
        return math.isinf(getattr(self, field_name))


def _dyadic_endpoint_integral(kernel, density_of_dist, d_max, threshold, window=20, max_levels=400):
    """Integrate ``kernel(d) * density(d)`` over ``(0, d_max]`` on panels ``[d_max 2^-k-1, d_max 2^-k]``.

    Returns ``math.inf`` when the partial sums pass ``threshold`` or when the
    last ``window`` panel contributions stop decreasing (the signature of a
    logarithmically divergent tail).
    """
    total = 0.0
    incs = []
    for k in range(max_levels):
        hi = d_max * 2.0**-k
        lo = 0.5 * hi
        inc = float(quad.adaptive_panels(lambda d: kernel(d) * density_of_dist(d), [lo, hi], tol=1e-16 + 1e-14 * abs(total)).value)
        total += inc
        incs.append(inc)
        if total > threshold:
            return math.inf
        if k >= 8 and abs(inc) <= 1e-16 * max(1.0, abs(total)):
            return total
        if len(incs) > window:
            recent = np.array(incs[-window - 1:])
            if np.all(recent > 0) and np.all(recent[1:] >= recent[:-1] * (1 - 1e-6)):
                return math.inf
    return math.inf


def _endpoint_integral(measure: LoewnerMeasure, upper: bool, kind: str, threshold: float) -> float:
    kernel = (lambda d: -np.log(d)) if kind == "log" else (lambda d: 1.0 / d)
    # distance to the endpoint: d = 1 - lam (upper) or 1 + lam (lower), over lam in [1/2, 1] / [-1, -1/2]
    to_lam = (lambda d: 1.0 - d) if upper else (lambda d: d - 1.0)
    total = 0.0
    for loc, w in measure.atoms:
        if (upper and loc >= 0.5) or (not upper and loc <= -0.5):
            total += w * float(kernel(np.array([1.0 - loc if upper else 1.0 + loc]))[0])
    for dens in measure.densities:
        lo = max(dens.lo, 0.5) if upper else max(dens.lo, -1.0)
        hi = min(dens.hi, 1.0) if upper else min(dens.hi, -0.5)
        if hi <= lo:
            continue
        d_near = 1.0 - hi if upper else 1.0 + lo
        d_far = 1.0 - lo if upper else 1.0 + hi
        rho = lambda d, dens=dens: dens(to_lam(d))
        if d_near > 0:
            total += float(quad.integrate_interval(lambda d: kernel(d) * rho(d), d_near, d_far, tol=1e-13).value)
        else:
            total += _dyadic_endpoint_integral(kernel, rho, d_far, threshold)
        if math.isinf(total):
            return math.inf
    return total


def integrability_diagnostics(spec: PhiSpec, threshold: float = DIVERGENCE_THRESHOLD) -> IntegrabilityReport:
    """The four endpoint integrals of the measure near ``lam = +-1``.

    ``int_{1/2}^1 -ln(1-lam) dmu`` and its mirror are finite for every
    admissible ``phi``; ``int_{1/2}^1 dmu/(1-lam)`` (and mirror) are finite
    exactly when ``phi'`` stays bounded at ``x = 1`` (resp. ``x = 0``).
    """
    _require_rep(spec)
    m = spec.measure
    return IntegrabilityReport(
        log_integral_upper=_endpoint_integral(m, True, "log", threshold),
        log_integral_lower=_endpoint_integral(m, False, "log", threshold),
        inverse_integral_upper=_endpoint_integral(m, True, "inverse", threshold),
        inverse_integral_lower=_endpoint_integral(m, False, "inverse", threshold),
    )
