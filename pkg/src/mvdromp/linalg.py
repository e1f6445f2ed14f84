"""Complex linear-algebra kernels.

All matrices are ``complex128`` numpy arrays (C order, i.e. row-major).
Vectors are 1-D ``complex128`` arrays.
"""

import numpy as np
from scipy import linalg as sla

from .errors import ContractViolation, DegenerateBasisError, DomainError

HERMITIAN_RTOL = 1e-10
GRAM_COND_LIMIT = 1e12


def as_complex_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DomainError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains NaN or Inf entries")
    return arr


def as_complex_vector(x, name="vector"):
    """Return ``x`` as a finite 1-D complex128 array."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains NaN or Inf entries")
    return arr


def hermitian_part(g):
    return 0.5 * (g + g.conj().T)


def regularized_hermitian_solve(G, reg, rhs):
    """Solve ``(G + reg * I) X = rhs`` for Hermitian PSD ``G``.

    Parameters
    ----------
    G : (M, M) array_like
        Hermitian positive semi-definite matrix. Asymmetry larger than
        ``1e-10`` relative (Frobenius) is rejected; smaller asymmetry is
        removed by taking the Hermitian part.
    reg : float
        Strictly positive diagonal loading.
    rhs : (M,) or (M, p) array_like
        Right-hand side(s).

    Returns
    -------
    X : ndarray
        Same shape as ``rhs``.
    """
    G = as_complex_matrix(G, "G")
    m = G.shape[0]
    if G.shape != (m, m):
        raise DomainError(f"G must be square, got shape {G.shape}")
    reg = float(reg)
    if not np.isfinite(reg) or reg <= 0:
        raise DomainError(f"regularization must be positive, got {reg}")
    asym = np.linalg.norm(G - G.conj().T)
    if asym > HERMITIAN_RTOL * max(np.linalg.norm(G), np.finfo(float).tiny):
        raise ContractViolation(f"G is not Hermitian (||G - G^H||_F = {asym:.3e})")
    rhs = np.asarray(rhs, dtype=np.complex128)
    if rhs.shape[0] != m:
        raise DomainError(f"rhs has {rhs.shape[0]} rows, expected {m}")

    loaded = hermitian_part(G) + reg * np.eye(m)
    factor = sla.cho_factor(loaded, lower=True, check_finite=False)
    return sla.cho_solve(factor, rhs, check_finite=False)


def _gram_factor(basis):
    gram = hermitian_part(basis.conj().T @ basis)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_COND_LIMIT:
        raise DegenerateBasisError(
            f"basis is rank deficient (Gram condition number {cond:.3e})"
        )
    return sla.cho_factor(gram, lower=True, check_finite=False)


def least_squares_fit(basis, x):
    """Coefficients ``c`` minimizing ``||x - basis @ c||`` via the Gram system."""
    basis = as_complex_matrix(basis, "basis")
    x = as_complex_vector(x, "x")
    m, k = basis.shape
    if x.shape[0] != m:
        raise DomainError(f"x has length {x.shape[0]}, expected {m}")
    if k == 0:
        return np.zeros(0, dtype=np.complex128)
    if k > m:
        raise DegenerateBasisError(f"{k} columns cannot be independent in C^{m}")
    factor = _gram_factor(basis)
    return sla.cho_solve(factor, basis.conj().T @ x, check_finite=False)


def orthogonal_projector_apply(basis, x):
    """Project ``x`` onto the orthogonal complement of ``span(basis)``.

    The projector ``I - B (B^H B)^{-1} B^H`` is never formed; the Gram system
    is solved instead. Raises :class:`DegenerateBasisError` when the Gram
    matrix condition number exceeds ``1e12``.
    """
    basis = as_complex_matrix(basis, "basis")
    x = as_complex_vector(x, "x")
    coef = least_squares_fit(basis, x)
    return x - basis @ coef
