"""Exhaustive best K-term approximation (the performance reference for greedy methods)."""

import itertools
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dictionary import Dictionary
from .errors import CapacityError, DegenerateBasisError, DomainError
from .linalg import GRAM_COND_LIMIT, as_complex_vector, least_squares_fit

SEARCH_LIMIT = 1_000_000
TIE_RTOL = 1e-12
# pairs whose closed-form residual is this close (relative to ||x||^2) to the best
# are re-fit exactly before the winner is chosen
_REFIT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class OracleResult:
    support: Tuple[int, ...]
    coefficients: np.ndarray
    residual_norm: float


def _fit(dictionary, x, support):
    basis = dictionary.atoms[:, list(support)]
    coef = least_squares_fit(basis, x)
    return coef, float(np.linalg.norm(x - basis @ coef))


def _pick(candidates):
    """Min residual; residuals within TIE_RTOL of the best go to the smallest support."""
    best = min(r for _, _, r in candidates)
    tol = TIE_RTOL * max(best, np.finfo(float).tiny)
    return min((s for s, _, r in candidates if r <= best + tol))


def _pair_scan(dictionary, x):
    g = dictionary.gram()
    c = dictionary.atoms.conj().T @ x
    n = dictionary.n_atoms
    i, j = np.triu_indices(n, k=1)
    gii = g[i, i].real
    gjj = g[j, j].real
    gij = g[i, j]
    det = gii * gjj - np.abs(gij) ** 2
    # closed-form eigenvalues of the 2x2 Hermitian Gram matrix
    half_tr = 0.5 * (gii + gjj)
    spread = np.sqrt(0.25 * (gii - gjj) ** 2 + np.abs(gij) ** 2)
    lam_min = half_tr - spread
    lam_max = half_tr + spread
    ok = lam_min > lam_max / GRAM_COND_LIMIT
    ci, cj = c[i], c[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        explained = (
            gjj * np.abs(ci) ** 2 + gii * np.abs(cj) ** 2 - 2.0 * np.real(np.conj(ci) * gij * cj)
        ) / det
    energy = float(np.vdot(x, x).real)
    res2 = np.where(ok, energy - explained, np.inf)
    if not np.any(ok):
        raise DegenerateBasisError("every atom pair is numerically degenerate")
    best = np.min(res2)
    near = np.flatnonzero(res2 <= best + _REFIT_RTOL * max(energy, np.finfo(float).tiny))
    return [(int(i[p]), int(j[p])) for p in near]


def exhaustive_k_term(x, dictionary: Dictionary, k: int) -> OracleResult:
    """Globally optimal ``k``-atom least-squares approximation of ``x``.

    Every size-``k`` support is tried; supports with a Gram condition number
    above ``1e12`` are skipped. Ties within ``1e-12`` relative residual go to
    the lexicographically smallest support. The search is refused when
    ``N**k > 1e6``; for ``k = 2`` a closed-form 2x2 scan over the precomputed
    Gram matrix is used.
    """
    x = as_complex_vector(x, "x")
    if x.shape[0] != dictionary.element_count:
        raise DomainError(
            f"x has length {x.shape[0]}, dictionary has {dictionary.element_count} rows"
        )
    n = dictionary.n_atoms
    if int(k) != k or k < 1 or k > n:
        raise DomainError(f"k must be an integer in [1, {n}], got {k}")
    if n**k > SEARCH_LIMIT:
        raise CapacityError(f"N**k = {n}**{k} exceeds the search limit {SEARCH_LIMIT}")

    if k == 2:
        supports = _pair_scan(dictionary, x)
    else:
        supports = list(itertools.combinations(range(n), k))

    candidates = []
    for s in supports:
        try:
            coef, r = _fit(dictionary, x, s)
        except DegenerateBasisError:
            continue
        candidates.append((tuple(s), coef, r))
    if not candidates:
        raise DegenerateBasisError(f"every size-{k} support is numerically degenerate")
    support = _pick(candidates)
    coef, r = next((c, r) for s, c, r in candidates if s == support)
    return OracleResult(support=support, coefficients=coef, residual_norm=r)


def exhaustive_with_fewer_terms(x, dictionary: Dictionary, k: int) -> OracleResult:
    """Diagnostic: best approximation using at most ``k`` atoms.

    Differs from :func:`exhaustive_k_term` only if a smaller support fits
    strictly better, which cannot happen in exact arithmetic but can when
    larger supports are skipped as degenerate.
    """
    results = [exhaustive_k_term(x, dictionary, j) for j in range(1, k + 1)]
    best = min(r.residual_norm for r in results)
    return next(r for r in reversed(results) if r.residual_norm <= best * (1 + TIE_RTOL))
