"""Ordinary and generalized orthogonal matching pursuit."""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .dictionary import Dictionary
from .errors import DomainError
from .linalg import as_complex_vector, least_squares_fit, orthogonal_projector_apply
from .sensing import SensingDictionary, identity_sensing


@dataclass(frozen=True)
class PursuitConfig:
    """Number of atoms to select. The sensing dictionary is always built once per pursuit."""

    sparsity: int
    reuse_sensing: bool = True

    def __post_init__(self):
        if int(self.sparsity) != self.sparsity or self.sparsity < 1:
            raise DomainError(f"sparsity must be a positive integer, got {self.sparsity}")
        if not self.reuse_sensing:
            raise DomainError("per-iteration sensing refresh is not supported")


@dataclass(frozen=True, eq=False)
class SparseSolution:
    support: Tuple[int, ...]
    coefficients: np.ndarray
    residual: np.ndarray
    residual_norm: float
    iterations: int
    residual_norms: Tuple[float, ...] = ()  # after each iteration


def _as_config(config) -> PursuitConfig:
    return config if isinstance(config, PursuitConfig) else PursuitConfig(int(config))


def generalized_omp(
    x,
    dictionary: Dictionary,
    sensing: SensingDictionary,
    config: Union[PursuitConfig, int],
) -> SparseSolution:
    """OMP that picks atoms by ``|W^H r|`` but fits and projects with ``A``.

    Runs exactly ``config.sparsity`` iterations. Already-selected atoms are
    excluded from the argmax; ties go to the lowest index.

    Parameters
    ----------
    x : (M,) array_like
        Observed signal.
    dictionary : Dictionary
        Atoms ``A`` used for the least-squares fit and residual update.
    sensing : SensingDictionary
        Selection vectors ``W``; must have the dictionary's shape.
    config : PursuitConfig or int
        Sparsity ``K``, ``1 <= K <= M``.
    """
    config = _as_config(config)
    x = as_complex_vector(x, "x")
    a = dictionary.atoms
    m, n = a.shape
    if x.shape[0] != m:
        raise DomainError(f"x has length {x.shape[0]}, dictionary has {m} rows")
    if sensing.shape != a.shape:
        raise DomainError(f"sensing shape {sensing.shape} differs from dictionary {a.shape}")
    k_max = config.sparsity
    if k_max > min(m, n):
        raise DomainError(f"sparsity {k_max} exceeds min(M, N) = {min(m, n)}")

    w_h = sensing.vectors.conj().T
    support = []
    residual = x
    norms = []
    for _ in range(k_max):
        score = np.abs(w_h @ residual)
        score[support] = -np.inf
        support.append(int(np.argmax(score)))
        residual = orthogonal_projector_apply(a[:, support], x)
        norms.append(float(np.linalg.norm(residual)))

    # final fit in index order so equal supports give bit-equal residuals
    order = np.argsort(support)
    ordered = [support[i] for i in order]
    basis = a[:, ordered]
    fit = least_squares_fit(basis, x)
    residual = x - basis @ fit
    coef = np.empty_like(fit)
    coef[order] = fit
    norms[-1] = float(np.linalg.norm(residual))

    return SparseSolution(
        support=tuple(support),
        coefficients=coef,
        residual=residual,
        residual_norm=norms[-1],
        iterations=k_max,
        residual_norms=tuple(norms),
    )


def ordinary_omp(x, dictionary: Dictionary, config: Union[PursuitConfig, int]) -> SparseSolution:
    """Plain OMP: :func:`generalized_omp` with ``W = A``."""
    return generalized_omp(x, dictionary, identity_sensing(dictionary), config)
