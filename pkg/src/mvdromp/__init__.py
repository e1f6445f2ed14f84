"""Generalized OMP with MVDR sensing dictionaries for coherent-dictionary sparse recovery."""

__version__ = "0.1.0"

from .dictionary import (
    AngleGrid,
    Dictionary,
    build_ula_dictionary,
    cross_correlation_row,
    identity_dictionary,
    mutual_coherence,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    ContractViolation,
    DegenerateBasisError,
    DomainError,
    MvdrOmpError,
)
from .experiment import (
    BetaSchedule,
    MadReport,
    Scenario,
    beta_for_snr,
    default_beta_schedule,
    estimate_doas,
    generate_snapshot,
    mad_assign,
    run_monte_carlo,
)
from .greedy import PursuitConfig, SparseSolution, generalized_omp, ordinary_omp
from .linalg import orthogonal_projector_apply, regularized_hermitian_solve
from .oracle import OracleResult, exhaustive_k_term
from .sensing import (
    SensingDictionary,
    apply_weight_override,
    ideal_mvdr_sensing,
    nonadaptive_sensing,
    sbwmvdr_sensing,
)

__all__ = [name for name in dir() if not name.startswith("_")]
