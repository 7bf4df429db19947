"""Hermitian matrices, spectral functional calculus and seeded random instances.

Everything here works on plain ``numpy`` arrays.  ``StateOperator`` is the one
wrapper type: a Hermitian matrix whose spectrum was checked to lie in ``[0, 1]``
and whose eigen-decomposition is cached.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .errors import DomainError, ValidationError

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-10
PROJECTOR_TOL = 1e-11
CONTRACTION_TOL = 1e-10


def _as_array(M) -> np.ndarray:
    if isinstance(M, StateOperator):
        return M.matrix
    return np.asarray(M)


def as_hermitian(M, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate ``M`` as a square Hermitian matrix and return it as complex128.

    The returned matrix is the exact Hermitian part ``(M + M*)/2`` so that
    downstream eigen-solvers never see floating-point asymmetry.
    """
    M = np.array(_as_array(M), dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValidationError("matrix has non-finite entries")
    asym = np.max(np.abs(M - M.conj().T))
    if asym > tol:
        raise ValidationError(f"matrix is not Hermitian: max |M - M*| = {asym:.3e}")
    return 0.5 * (M + M.conj().T)


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, values=None) -> np.ndarray:
        """Return ``U diag(values) U*``; ``values`` defaults to the eigenvalues."""
        lam = self.eigenvalues if values is None else values
        U = self.eigenvectors
        return (U * lam) @ U.conj().T


def spectral_decompose(M) -> SpectralDecomposition:
    if isinstance(M, StateOperator):
        return M.spectral()
    H = as_hermitian(M)
    w, U = np.linalg.eigh(H)
    return SpectralDecomposition(w, U)


@dataclass(frozen=True, eq=False)
class StateOperator:
    """A Hermitian matrix with ``0 <= M <= 1``.

    Eigenvalues within ``SPECTRUM_TOL`` outside ``[0, 1]`` are treated as
    rounding noise and clamped; anything further out is rejected.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @classmethod
    def from_matrix(cls, M, tol: float = SPECTRUM_TOL) -> "StateOperator":
        if isinstance(M, StateOperator):
            return M
        H = as_hermitian(M)
        w, U = np.linalg.eigh(H)
        if w[0] < -tol or w[-1] > 1 + tol:
            raise ValidationError(
                f"spectrum [{w[0]:.3e}, {w[-1]:.3e}] is not inside [0, 1]"
            )
        w = np.clip(w, 0.0, 1.0)
        for arr in (H, w, U):
            arr.setflags(write=False)
        return cls(H, w, U)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectral(self) -> SpectralDecomposition:
        return SpectralDecomposition(self.eigenvalues, self.eigenvectors)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_state(M) -> StateOperator:
    return StateOperator.from_matrix(M)


class Interval(NamedTuple):
    """Domain of a scalar function; an open end excludes the endpoint itself."""

    lo: float = -np.inf
    hi: float = np.inf
    closed_lo: bool = True
    closed_hi: bool = True

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x)
        lo_ok = x >= self.lo if self.closed_lo else x > self.lo
        hi_ok = x <= self.hi if self.closed_hi else x < self.hi
        return lo_ok & hi_ok


def apply_function(f: Callable, M, domain: Interval | None = None) -> np.ndarray:
    """Spectral functional calculus ``U diag(f(eigenvalues)) U*``.

    ``f`` must accept a 1-d array of eigenvalues.  If ``domain`` is given, an
    eigenvalue outside it raises :class:`DomainError` carrying that eigenvalue.
    """
    dec = spectral_decompose(M)
    if domain is not None:
        bad = ~domain.contains(dec.eigenvalues)
        if np.any(bad):
            ev = float(dec.eigenvalues[bad][0])
            raise DomainError(f"eigenvalue {ev!r} outside function domain {tuple(domain)}", ev)
    vals = np.asarray(f(dec.eigenvalues), dtype=float)
    return dec.reconstruct(vals)


# -- norms ---------------------------------------------------------------


def trace(M) -> complex:
    return complex(np.trace(_as_array(M)))


def trace_norm(M) -> float:
    return float(np.sum(np.linalg.svd(_as_array(M), compute_uv=False)))


def hs_norm(M) -> float:
    return float(np.linalg.norm(_as_array(M), "fro"))


def op_norm(M) -> float:
    return float(np.linalg.norm(_as_array(M), 2))


# -- contractions and compressions ---------------------------------------


@dataclass(frozen=True, eq=False)
class Contraction:
    """A linear map ``X`` (rows x cols) with ``X* X <= 1``."""

    matrix: np.ndarray

    def __post_init__(self):
        X = np.array(self.matrix, dtype=complex)
        if X.ndim != 2 or 0 in X.shape:
            raise ValidationError(f"contraction must be a non-empty 2-d matrix, got {X.shape}")
        smax = np.linalg.norm(X, 2)
        if smax > 1 + CONTRACTION_TOL:
            raise ValidationError(f"largest singular value {smax:.6g} exceeds 1")
        X.setflags(write=False)
        object.__setattr__(self, "matrix", X)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    @classmethod
    def identity(cls, dim: int) -> "Contraction":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def coordinate(cls, rank: int, dim: int) -> "Contraction":
        """The map keeping the first ``rank`` coordinates of ``C^dim``."""
        return cls(np.eye(rank, dim, dtype=complex))


def compress(M, X):
    """Return ``X M X*``.  A :class:`StateOperator` input gives a state back."""
    Xm = X.matrix if isinstance(X, Contraction) else np.asarray(X, dtype=complex)
    A = as_hermitian(M)
    if Xm.shape[1] != A.shape[0]:
        raise ValidationError(
            f"dimension mismatch: contraction has {Xm.shape[1]} columns, matrix is {A.shape[0]}x{A.shape[0]}"
        )
    out = Xm @ A @ Xm.conj().T
    out = 0.5 * (out + out.conj().T)
    if isinstance(M, StateOperator):
        return StateOperator.from_matrix(out)
    return out


def check_projector(P, tol: float = PROJECTOR_TOL) -> np.ndarray:
    P = np.asarray(P, dtype=complex)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValidationError(f"projector must be square, got {P.shape}")
    if np.max(np.abs(P - P.conj().T)) > tol:
        raise ValidationError("projector is not Hermitian")
    if np.max(np.abs(P @ P - P)) > tol:
        raise ValidationError("projector is not idempotent")
    return P


def projector_rank(P) -> int:
    return int(round(np.trace(np.asarray(P)).real))


def range_basis(P) -> np.ndarray:
    """Canonical orthonormal basis (as columns) of the range of a projector.

    Columns of ``P`` are scanned left to right and kept greedily when they add a
    new direction; the kept columns are then orthonormalised by QR with the
    diagonal of ``R`` made positive.  For coordinate projectors this returns
    the selected unit vectors themselves.
    """
    P = check_projector(P)
    r = projector_rank(P)
    n = P.shape[0]
    if r == 0:
        return np.zeros((n, 0), dtype=complex)
    chosen: list[int] = []
    basis = np.zeros((n, 0), dtype=complex)
    for j in range(n):
        v = P[:, j]
        resid = v - basis @ (basis.conj().T @ v)
        nrm = np.linalg.norm(resid)
        if nrm > 1e-6:
            chosen.append(j)
            basis = np.column_stack([basis, resid / nrm])
            if len(chosen) == r:
                break
    Q, R = np.linalg.qr(P[:, chosen])
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases.conj()


def restrict_to_range(M, P) -> np.ndarray:
    """``P M P`` written in the :func:`range_basis` of ``P`` (a rank(P) square matrix)."""
    A = as_hermitian(M)
    V = range_basis(P)
    if V.shape[0] != A.shape[0]:
        raise ValidationError("projector and matrix dimensions differ")
    out = V.conj().T @ A @ V
    out = 0.5 * (out + out.conj().T)
    if isinstance(M, StateOperator):
        return StateOperator.from_matrix(out)
    return out


@dataclass(frozen=True, eq=False)
class ProjectionChain:
    """Increasing projections ``P_1 <= P_2 <= ...`` on a fixed ambient space."""

    ambient_dim: int
    ranks: tuple
    projectors: tuple = field(repr=False)

    def __post_init__(self):
        if len(self.ranks) != len(self.projectors) or not self.ranks:
            raise ValidationError("chain needs one rank per projector and at least one projector")
        if any(b <= a for a, b in zip(self.ranks, self.ranks[1:])):
            raise ValidationError(f"ranks must be strictly increasing, got {list(self.ranks)}")
        prev = None
        for k, P in zip(self.ranks, self.projectors):
            check_projector(P)
            if P.shape != (self.ambient_dim, self.ambient_dim):
                raise ValidationError("projector shape does not match ambient dimension")
            if projector_rank(P) != k:
                raise ValidationError(f"projector trace {np.trace(P).real:.6g} != declared rank {k}")
            if prev is not None and np.max(np.abs(prev @ P - prev)) > PROJECTOR_TOL:
                raise ValidationError("projectors are not nested (P_k P_{k+1} != P_k)")
            prev = P

    @classmethod
    def from_projectors(cls, projectors: Sequence) -> "ProjectionChain":
        projs = tuple(np.asarray(P, dtype=complex) for P in projectors)
        if not projs:
            raise ValidationError("empty projection chain")
        ranks = tuple(projector_rank(P) for P in projs)
        return cls(projs[0].shape[0], ranks, projs)

    @classmethod
    def from_basis(cls, basis, ranks: Sequence[int] | None = None) -> "ProjectionChain":
        """Projectors onto the spans of the first ``k`` columns of a unitary."""
        V = np.asarray(basis, dtype=complex)
        n = V.shape[0]
        ranks = tuple(range(1, n + 1)) if ranks is None else tuple(int(k) for k in ranks)
        projs = tuple(V[:, :k] @ V[:, :k].conj().T for k in ranks)
        return cls(n, ranks, projs)

    @classmethod
    def prefix(cls, ambient_dim: int, ranks: Sequence[int] | None = None) -> "ProjectionChain":
        return cls.from_basis(np.eye(ambient_dim, dtype=complex), ranks)

    @classmethod
    def random_nested(cls, ambient_dim: int, ranks=None, seed=None) -> "ProjectionChain":
        return cls.from_basis(random_unitary(ambient_dim, seed), ranks)

    def __len__(self):
        return len(self.projectors)


# -- random instances ------------------------------------------------------


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary; ``seed`` may be an int or a ``numpy`` Generator."""
    rng = np.random.default_rng(seed)
    if dim < 1:
        raise ValidationError("dimension must be positive")
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)


def random_state(dim: int, spectrum_low: float = 0.0, spectrum_high: float = 1.0, seed=None) -> StateOperator:
    """Random state with uniform eigenvalues in the given range and Haar eigenvectors."""
    if dim < 1:
        raise ValidationError("dimension must be positive")
    if not (0.0 <= spectrum_low <= spectrum_high <= 1.0):
        raise ValidationError(
            f"need 0 <= low <= high <= 1, got [{spectrum_low}, {spectrum_high}]"
        )
    rng = np.random.default_rng(seed)
    w = rng.uniform(spectrum_low, spectrum_high, size=dim)
    U = random_unitary(dim, rng)
    M = (U * w) @ U.conj().T
    return StateOperator.from_matrix(0.5 * (M + M.conj().T))


def random_contraction(rows: int, cols: int, seed=None, identity: bool = False, rank: int | None = None) -> Contraction:
    """Complex Gaussian matrix with singular values rescaled so the largest is 1.

    ``rank`` zeroes all but the ``rank`` largest singular values.
    """
    if rows < 1 or cols < 1:
        raise ValidationError("contraction dimensions must be positive")
    if identity:
        if rows != cols:
            raise ValidationError("identity contraction needs rows == cols")
        return Contraction.identity(rows)
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    U, s, Vh = np.linalg.svd(G, full_matrices=False)
    s = s / s[0]
    if rank is not None:
        s[rank:] = 0.0
    s = np.minimum(s, 1.0)
    return Contraction((U * s) @ Vh)
