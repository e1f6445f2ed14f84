"""MVDR-type sensing dictionaries for generalized OMP.

Each sensing vector solves

    minimize  w^H (R + reg*I) w   subject to  A_n^H w = 1

for an interference covariance ``R``. The closed form is
``w_n = (R + reg*I)^{-1} A_n / (A_n^H (R + reg*I)^{-1} A_n)``; every column
shares the same matrix, so one factorization serves all ``N`` atoms.

Variants differ only in ``R``:

* ``ideal``        R = B B^H, B = the true atoms (oracle; needs the support)
* ``semi_blind``   R = A D^2 A^H with D = diag(|A^H x|)
* ``non_adaptive`` R = A A^H
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dictionary import Dictionary, cross_correlation_row
from .errors import DomainError
from .linalg import regularized_hermitian_solve

KINDS = ("ideal", "semi_blind", "non_adaptive", "identity")
DEFAULT_ALPHA = 0.01


@dataclass(frozen=True, eq=False)
class SensingDictionary:
    """Sensing vectors ``W`` (same shape as the dictionary) and how they were made."""

    vectors: np.ndarray
    kind: str
    regularization: Optional[float] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sensing kind {self.kind!r}")
        if self.kind != "identity" and not (
            self.regularization is not None and self.regularization > 0
        ):
            raise DomainError("regularization must be positive")
        self.vectors.setflags(write=False)

    @property
    def shape(self):
        return self.vectors.shape


def identity_sensing(dictionary: Dictionary) -> SensingDictionary:
    """``W = A``: turns generalized OMP into ordinary OMP."""
    return SensingDictionary(vectors=dictionary.atoms, kind="identity")


def _check_reg(reg, name):
    reg = float(reg)
    if not np.isfinite(reg) or reg <= 0:
        raise DomainError(f"{name} must be positive, got {reg}")
    return reg


def mvdr_columns(atoms, covariance, reg):
    """Distortionless MVDR vectors for every column of ``atoms`` against ``covariance``."""
    if not np.any(covariance):
        # (reg*I)^{-1} A_n / (A_n^H (reg*I)^{-1} A_n) = A_n for unit-norm atoms
        return atoms.copy()
    solved = regularized_hermitian_solve(covariance, reg, atoms)
    gains = np.einsum("mn,mn->n", atoms.conj(), solved)
    return solved / gains


def weighted_covariance(atoms, weights):
    """``A diag(weights)^2 A^H`` without forming ``A diag(weights)``'s product twice."""
    return (atoms * weights**2) @ atoms.conj().T


def ideal_mvdr_sensing(dictionary: Dictionary, true_support, alpha: float = DEFAULT_ALPHA) -> SensingDictionary:
    """Oracle sensing dictionary built from the true atoms.

    An empty support gives ``W = A``.
    """
    alpha = _check_reg(alpha, "alpha")
    support = [int(i) for i in true_support]
    n = dictionary.n_atoms
    if any(not 0 <= i < n for i in support):
        raise DomainError(f"support {support} has indices outside [0, {n})")
    a = dictionary.atoms
    b = a[:, support]
    cov = b @ b.conj().T
    return SensingDictionary(mvdr_columns(a, cov, alpha), "ideal", alpha)


def apply_weight_override(dictionary: Dictionary, weights, beta: float, kind: str = "semi_blind") -> SensingDictionary:
    """Sensing dictionary for an explicit atom weighting ``D = diag(weights)``."""
    beta = _check_reg(beta, "beta")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (dictionary.n_atoms,):
        raise DomainError(
            f"weights must have length {dictionary.n_atoms}, got shape {weights.shape}"
        )
    if not np.all(np.isfinite(weights)):
        raise DomainError("weights must be finite")
    if np.any(weights < 0):
        raise DomainError("weights must be nonnegative")
    a = dictionary.atoms
    cov = weighted_covariance(a, weights)
    return SensingDictionary(mvdr_columns(a, cov, beta), kind, beta)


def sbwmvdr_sensing(dictionary: Dictionary, x, beta: float) -> SensingDictionary:
    """Semi-blindly weighted MVDR sensing dictionary.

    Atoms are weighted by their correlation with the observed snapshot,
    ``|A^H x|``, so no knowledge of the true support is needed. Weights are
    used raw; scaling ``x`` by ``c`` is equivalent to scaling ``beta`` by
    ``1/|c|^2``.
    """
    weights = cross_correlation_row(dictionary, x)
    return apply_weight_override(dictionary, weights, beta, kind="semi_blind")


def nonadaptive_sensing(dictionary: Dictionary, beta: float) -> SensingDictionary:
    """Signal-independent variant with unit weights (``R = A A^H``)."""
    ones = np.ones(dictionary.n_atoms)
    return apply_weight_override(dictionary, ones, beta, kind="non_adaptive")


def distortionless_error(dictionary: Dictionary, sensing: SensingDictionary) -> float:
    """``max_n |A_n^H w_n - 1|``."""
    resp = np.einsum("mn,mn->n", dictionary.atoms.conj(), sensing.vectors)
    return float(np.max(np.abs(resp - 1.0)))
