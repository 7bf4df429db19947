"""Desk-scale experiments: projection and compression sweeps, monotonicity trials,
counterexample search and boundary-eigenvalue probes.

A finite ambient dimension stands in for the infinite-dimensional space.  Each
randomised routine derives an independent stream per trial from
``(seed, trial_index)`` so that reports are reproducible and order independent.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import (
    EntropyValue,
    relative_entropy_direct,
    relative_entropy_gateaux,
    relative_entropy_integral,
)
from .errors import ValidationError
from .hermitian import (
    Contraction,
    ProjectionChain,
    as_state,
    compress,
    random_contraction,
    random_state,
    random_unitary,
    restrict_to_range,
)
from .loewner import PhiSpec
from .matrixio import fmt_float, matrix_from_dict, matrix_to_dict

TRACE_TOL = 1e-9
TRIAL_SPECTRUM = (0.05, 0.95)


def _cell(v: EntropyValue) -> str:
    return fmt_float(v.value) if v.is_finite else "inf"


def _reason(v: EntropyValue) -> str:
    return "" if v.reason is None else v.reason.value


@dataclass(frozen=True)
class ConvergenceTrace:
    """Entropies along a sweep, plus the value on the full ambient pair.

    For compression sweeps ``ranks`` holds the target dimension of each map
    and ``sigma_min`` the smallest singular value of ``X* X`` (square-rooted).
    """

    ranks: tuple
    values: tuple
    limit_value: EntropyValue
    ambient_dim: int
    sigma_min: tuple | None = None

    def is_monotone(self, tol: float = TRACE_TOL) -> bool:
        """Nondecreasing within ``tol``; ``+inf`` sits above every finite value."""
        for prev, cur in zip(self.values, self.values[1:]):
            if prev.is_finite and cur.is_finite:
                if cur.value < prev.value - tol:
                    return False
            elif not prev.is_finite and cur.is_finite:
                return False
        return True

    def matches_limit(self, tol: float = TRACE_TOL) -> bool:
        last, lim = self.values[-1], self.limit_value
        if not (last.is_finite and lim.is_finite):
            return last.is_finite == lim.is_finite
        return abs(last.value - lim.value) <= tol

    def compression_converged(self, floor: float = 1e-6) -> bool:
        """Last value within ``max(floor, 10 (1 - sigma_min))`` of the full value."""
        if self.sigma_min is None:
            raise ValidationError("not a compression trace")
        return self.matches_limit(max(floor, 10.0 * (1.0 - self.sigma_min[-1])))

    def to_dict(self) -> dict:
        out = {
            "ambient_dim": self.ambient_dim,
            "ranks": list(self.ranks),
            "values": [v.to_json() for v in self.values],
            "reasons": [_reason(v) or None for v in self.values],
            "limit_value": self.limit_value.to_json(),
            "limit_reason": _reason(self.limit_value) or None,
            "monotone": self.is_monotone(),
            "matches_limit": self.matches_limit(),
        }
        if self.sigma_min is not None:
            out["sigma_min"] = list(self.sigma_min)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "value", "reason"])
        for k, v in zip(self.ranks, self.values):
            w.writerow([k, _cell(v), _reason(v)])
        w.writerow(["full", _cell(self.limit_value), _reason(self.limit_value)])
        return buf.getvalue()


def projection_sweep(spec: PhiSpec, A, B, chain: ProjectionChain) -> ConvergenceTrace:
    """``H(P A P, P B P)`` on the range of each projector of ``chain``.

    The limit is the derivative form on the full pair.  Infinite values are
    recorded, never raised.
    """
    A, B = as_state(A), as_state(B)
    if chain.ambient_dim != A.dim or B.dim != A.dim:
        raise ValidationError(
            f"chain ambient dimension {chain.ambient_dim} does not match operators of dimension {A.dim}"
        )
    values = tuple(
        relative_entropy_direct(spec, restrict_to_range(A, P), restrict_to_range(B, P))
        for P in chain.projectors
    )
    return ConvergenceTrace(tuple(chain.ranks), values, relative_entropy_gateaux(spec, A, B), A.dim)


def _sigma_min(X: Contraction) -> float:
    # smallest eigenvalue of X*X on the source space (zero when rows < cols)
    w = np.linalg.eigvalsh(X.matrix.conj().T @ X.matrix)
    return float(math.sqrt(max(w[0], 0.0)))


def compression_sweep(spec: PhiSpec, A, B, contractions) -> ConvergenceTrace:
    """``H(X A X*, X B X*)`` for each contraction ``X`` in order."""
    A, B = as_state(A), as_state(B)
    Xs = [X if isinstance(X, Contraction) else Contraction(X) for X in contractions]
    if not Xs:
        raise ValidationError("need at least one contraction")
    for X in Xs:
        if X.cols != A.dim:
            raise ValidationError(f"contraction has {X.cols} columns, operators have dimension {A.dim}")
    values = tuple(relative_entropy_direct(spec, compress(A, X), compress(B, X)) for X in Xs)
    return ConvergenceTrace(
        tuple(X.rows for X in Xs), values, relative_entropy_direct(spec, A, B), A.dim,
        sigma_min=tuple(_sigma_min(X) for X in Xs),
    )


@dataclass(frozen=True)
class TrialReport:
    """Outcome of a batch of monotonicity trials.

    ``violations`` lists ``(trial_index, magnitude)`` where the compressed
    entropy exceeded the uncompressed one by more than ``tol``; the random
    stream of trial ``i`` is ``numpy.random.default_rng([seed, i])``.
    """

    spec_name: str
    trials: int
    seed: int
    tol: float
    violations: tuple
    max_violation: float
    witness: dict | None = field(default=None, repr=False)
    inconclusive: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        out = {
            "phi": self.spec_name,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "violations": [[i, m if math.isfinite(m) else "inf"] for i, m in self.violations],
            "max_violation": self.max_violation if math.isfinite(self.max_violation) else "inf",
            "inconclusive": self.inconclusive,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "value", "reason"])
        for i, m in self.violations:
            w.writerow([i, fmt_float(m) if math.isfinite(m) else "inf", "violation"])
        return buf.getvalue()


def _excess(small: EntropyValue, big: EntropyValue) -> float:
    """How far ``H(XAX*, XBX*)`` exceeds ``H(A, B)``; ``inf`` if only the former is infinite."""
    if not big.is_finite:
        return -math.inf
    if not small.is_finite:
        return math.inf
    return small.value - big.value


def _trial(spec, rng, dim_a, dim_b, identity, spectrum, rank=None):
    A = random_state(dim_a, *spectrum, seed=rng)
    B = random_state(dim_a, *spectrum, seed=rng)
    X = random_contraction(dim_b, dim_a, seed=rng, identity=identity, rank=rank)
    full = relative_entropy_direct(spec, A, B)
    comp = relative_entropy_direct(spec, compress(A, X), compress(B, X))
    return A, B, X, full, comp


def monotonicity_trials(spec: PhiSpec, dim_a: int, dim_b: int, trials: int, seed: int,
                        tol: float = TRACE_TOL, identity: bool = False,
                        spectrum=TRIAL_SPECTRUM) -> TrialReport:
    """Check ``H(X A X*, X B X*) <= H(A, B) + tol`` on random ``(A, B, X)``."""
    if not spec.operator_monotone_derivative:
        raise ValidationError(f"{spec.name!r}: monotonicity only holds for operator-monotone phi'")
    if trials < 1:
        raise ValidationError("trials must be positive")
    violations = []
    worst = -math.inf
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        *_, full, comp = _trial(spec, rng, dim_a, dim_b, identity, spectrum)
        excess = _excess(comp, full)
        worst = max(worst, excess)
        if excess > tol:
            violations.append((i, excess))
    return TrialReport(spec.name, trials, seed, tol, tuple(violations), worst)


def counterexample_search(spec: PhiSpec, trials: int = 100_000, seed: int = 0,
                          threshold: float = 1e-6, dims=(2, 3)) -> TrialReport:
    """Random search for a monotonicity violation larger than ``threshold``.

    Contractions are biased toward low rank: the target dimension and the
    rank are drawn uniformly, so rank-one maps are common.  Stops at the first
    violation; ``inconclusive`` is set if none turns up.
    """
    if trials < 1:
        raise ValidationError("trials must be positive")
    worst = -math.inf
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        dim_a = int(rng.integers(dims[0], dims[1] + 1))
        dim_b = int(rng.integers(1, dim_a + 1))
        rank = int(rng.integers(1, dim_b + 1))
        A, B, X, full, comp = _trial(spec, rng, dim_a, dim_b, False, TRIAL_SPECTRUM, rank)
        excess = _excess(comp, full)
        worst = max(worst, excess)
        if excess > threshold:
            witness = {
                "phi": spec.name,
                "seed": seed,
                "trial": i,
                "A": matrix_to_dict(A.matrix),
                "B": matrix_to_dict(B.matrix),
                "X": matrix_to_dict(X.matrix),
                "entropy_full": full.value,
                "entropy_compressed": comp.value,
                "violation": excess,
            }
            return TrialReport(spec.name, i + 1, seed, threshold, ((i, excess),), excess, witness)
    return TrialReport(spec.name, trials, seed, threshold, (), worst, inconclusive=True)


def replay_witness(spec: PhiSpec, witness: dict) -> float:
    """Recompute the violation ``H(XAX*, XBX*) - H(A, B)`` stored in a witness."""
    A = as_state(matrix_from_dict(witness["A"]))
    B = as_state(matrix_from_dict(witness["B"]))
    X = Contraction(matrix_from_dict(witness["X"]))
    full = relative_entropy_direct(spec, A, B)
    comp = relative_entropy_direct(spec, compress(A, X), compress(B, X))
    return _excess(comp, full)


PROBE_MODES = ("MismatchAtZero", "AgreementAtZero", "MismatchAtOne", "AgreementAtOne")


@dataclass(frozen=True)
class ProbeReport:
    mode: str
    expect_infinite: bool
    direct: EntropyValue
    gateaux: EntropyValue
    integral: EntropyValue
    complement: EntropyValue
    sweep_kernel_first: ConvergenceTrace
    sweep_kernel_last: ConvergenceTrace
    tol: float

    @property
    def formula_values(self):
        return (self.direct, self.gateaux, self.integral)

    @property
    def passed(self) -> bool:
        first, last = self.sweep_kernel_first.values, self.sweep_kernel_last.values
        if self.expect_infinite:
            return (all(not v.is_finite for v in self.formula_values)
                    and all(not v.is_finite for v in first)
                    and all(v.is_finite for v in last[:-1]) and not last[-1].is_finite)
        if not all(v.is_finite for v in self.formula_values + first + last):
            return False
        if self.mode.startswith("Agreement"):
            return all(abs(v.value - self.complement.value) <= self.tol for v in self.formula_values)
        return True


def singular_probe(spec: PhiSpec, mode: str, dim: int = 3, seed: int = 0, tol: float = TRACE_TOL) -> ProbeReport:
    """Build ``B`` with an exact eigenvalue 0 or 1 and ``A`` agreeing with it or not.

    ``B = U (v + B') U*`` with ``v`` the boundary value on ``psi = U e_0``.  In
    agreement modes ``A = U (v + A') U*``, so the entropy should equal
    ``H(A', B')``; in mismatch modes ``A`` is a generic state and the entropy
    is infinite whenever ``phi'`` is singular at ``v``.  Two projection sweeps
    run along ``U``'s columns: one with ``psi`` first, one with ``psi`` last.
    """
    if mode not in PROBE_MODES:
        raise ValidationError(f"unknown probe mode {mode!r}; expected one of {PROBE_MODES}")
    if dim < 2:
        raise ValidationError("probe needs dim >= 2")
    at_one = mode.endswith("One")
    boundary = 1.0 if at_one else 0.0
    rng = np.random.default_rng([seed, PROBE_MODES.index(mode)])
    U = random_unitary(dim, rng)
    beta = rng.uniform(0.1, 0.9, size=dim - 1)
    Bc = np.diag(beta).astype(complex)
    Ac = random_state(dim - 1, 0.1, 0.9, seed=rng).matrix
    B = U @ np.diag(np.concatenate([[boundary], beta])) @ U.conj().T
    if mode.startswith("Agreement"):
        block = np.zeros((dim, dim), dtype=complex)
        block[0, 0] = boundary
        block[1:, 1:] = Ac
        A = U @ block @ U.conj().T
    else:
        A = random_state(dim, 0.1, 0.9, seed=rng).matrix
    A, B = as_state(0.5 * (A + A.conj().T)), as_state(0.5 * (B + B.conj().T))
    flagged = spec.discontinuous_at_one if at_one else spec.discontinuous_at_zero
    expect_inf = flagged and mode.startswith("Mismatch")
    integral = (relative_entropy_integral(spec, A, B) if spec.operator_monotone_derivative
                else relative_entropy_direct(spec, A, B))
    return ProbeReport(
        mode=mode,
        expect_infinite=expect_inf,
        direct=relative_entropy_direct(spec, A, B),
        gateaux=relative_entropy_gateaux(spec, A, B),
        integral=integral,
        complement=relative_entropy_direct(spec, Ac, Bc),
        sweep_kernel_first=projection_sweep(spec, A, B, ProjectionChain.from_basis(U)),
        sweep_kernel_last=projection_sweep(spec, A, B, ProjectionChain.from_basis(np.roll(U, -1, axis=1))),
        tol=tol,
    )
