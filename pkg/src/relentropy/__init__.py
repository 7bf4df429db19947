"""Monotone quantum relative entropies H(A, B) = tr[phi(A) - phi(B) - phi'(B)(A - B)]."""

from .entropy import (
    EntropyValue,
    Reason,
    SingularCase,
    classify_singular_case,
    gateaux_derivative_resolvent,
    gateaux_derivative_spectral,
    klein_ratio,
    relative_entropy_direct,
    relative_entropy_gateaux,
    relative_entropy_integral,
    theorem4_check,
)
from .errors import ConsistencyError, DomainError, QuadratureError, SingularCaseError, ValidationError
from .hermitian import (
    Contraction,
    ProjectionChain,
    StateOperator,
    as_state,
    compress,
    hs_norm,
    random_contraction,
    random_state,
    random_unitary,
)
from .lab import (
    compression_sweep,
    counterexample_search,
    monotonicity_trials,
    projection_sweep,
    replay_witness,
    singular_probe,
)
from .loewner import (
    LoewnerMeasure,
    PhiSpec,
    atom,
    bosonic,
    builtin,
    check_rep_consistency,
    fermionic,
    integrability_diagnostics,
    nonmonotone_quartic,
    power2,
)

__version__ = "0.1.0"
