"""Symmetric-matrix numerics.

This module provides the small set of dense linear algebra operations the
estimators are built on: Cholesky-based log-determinants, symmetric
eigendecomposition, the Frobenius projection onto the cone

    S(z) = { symmetric A : lambda_min(A) >= z },

and closed-form eigenvalue bounds for bandable correlation matrices
(entries decaying like ``c**|i-j|``).

Matrices are plain ``float64`` ndarrays. Inputs are symmetrized as
``(A + A.T) / 2`` on entry rather than rejected, because covariance
accumulation routinely produces asymmetry at the 1e-16 level.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoConvergence, NotPositiveDefinite

__all__ = [
    "EigenDecomposition",
    "as_symmetric",
    "as_correlation",
    "cholesky_logdet",
    "sym_eigen",
    "project_to_cone",
    "bandable_eigen_bounds",
    "is_bandable",
]


class EigenDecomposition(NamedTuple):
    """Eigenpairs of a symmetric matrix.

    Attributes
    ----------
    eigenvalues : ndarray, shape (D,)
        Real eigenvalues sorted in nonincreasing order, so the smallest is
        addressable as ``eigenvalues[-1]``.
    eigenvectors : ndarray, shape (D, D)
        Orthonormal eigenvectors as columns, ordered to match.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_symmetric(a) -> np.ndarray:
    """Coerce ``a`` to a square float64 array and symmetrize it.

    Parameters
    ----------
    a : array_like, shape (D, D)
        Square matrix; asymmetry is averaged away as ``(A + A.T) / 2``.

    Returns
    -------
    ndarray
        Exactly symmetric float64 copy of ``a``.

    Raises
    ------
    DomainError
        If ``a`` is not a square 2-d array with D >= 1, or contains
        non-finite entries.
    """
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix contains non-finite entries")
    return (m + m.T) / 2.0


def as_correlation(a, atol: float = 1e-12) -> np.ndarray:
    """Validate ``a`` as a correlation matrix and return it symmetrized.

    Checks that every diagonal entry equals 1 within ``atol`` and every
    off-diagonal entry lies in [-1, 1] (within ``atol``). The diagonal is
    then set to exactly 1.

    Raises
    ------
    DomainError
        If the diagonal or the off-diagonal range check fails.
    """
    m = as_symmetric(a)
    d = np.diag(m)
    if np.max(np.abs(d - 1.0)) > atol:
        raise DomainError("correlation matrix must have unit diagonal")
    if np.max(np.abs(m)) > 1.0 + atol:
        raise DomainError("correlation entries must lie in [-1, 1]")
    np.fill_diagonal(m, 1.0)
    return m


def cholesky_logdet(a) -> float:
    """Log-determinant of a symmetric positive definite matrix.

    Computes the Cholesky factor L and returns ``2 * sum(log(diag(L)))``,
    which is numerically preferable to ``log(det(A))`` because it never
    forms the (possibly under/overflowing) determinant.

    Parameters
    ----------
    a : array_like, shape (D, D)
        Symmetric positive definite matrix.

    Returns
    -------
    float
        ``log det A``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is non-positive, i.e. ``a`` is singular or indefinite.
    """
    m = as_symmetric(a)
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"Cholesky factorization failed: {exc}") from exc
    return float(2.0 * np.sum(np.log(np.diag(chol))))


def sym_eigen(a) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : array_like, shape (D, D)
        Symmetric matrix (symmetrized on entry).

    Returns
    -------
    EigenDecomposition
        Eigenvalues in nonincreasing order with matching eigenvector
        columns; satisfies ``Q @ diag(w) @ Q.T == A`` to around 1e-12
        relative accuracy.

    Raises
    ------
    NoConvergence
        If the underlying iterative reduction fails to converge.
    """
    m = as_symmetric(a)
    try:
        w, q = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"symmetric eigensolver failed: {exc}") from exc
    return EigenDecomposition(eigenvalues=w[::-1].copy(), eigenvectors=q[:, ::-1].copy())


def project_to_cone(a, z: float) -> np.ndarray:
    """Frobenius projection of a symmetric matrix onto S(z).

    Eigenvalues below ``z`` are clamped up to ``z`` while eigenvectors are
    kept, which is the unique Frobenius-nearest member of the cone of
    symmetric matrices with smallest eigenvalue >= z. Matrices already in
    the cone are returned unchanged up to reconstruction roundoff.

    Parameters
    ----------
    a : array_like, shape (D, D)
        Symmetric matrix.
    z : float
        Positive eigenvalue floor.

    Returns
    -------
    ndarray
        The projected matrix, exactly symmetric.

    Raises
    ------
    DomainError
        If ``z <= 0``.
    NoConvergence
        Propagated from :func:`sym_eigen`.
    """
    if not z > 0.0:
        raise DomainError(f"eigenvalue floor z must be positive, got {z}")
    m = as_symmetric(a)
    w, q = sym_eigen(m)
    if w[-1] >= z:
        return m
    clamped = np.maximum(w, z)
    out = (q * clamped) @ q.T
    return (out + out.T) / 2.0


def bandable_eigen_bounds(c: float, d: int) -> tuple[float, float]:
    """Eigenvalue bounds for c-bandable correlation matrices.

    For any symmetric unit-diagonal matrix with ``|A[i, j]| <= c**|i-j|``
    the Gershgorin disc radius is at most ``2c/(1-c)`` in every row, giving
    dimension-free bounds

        lower = (1 - 3c) / (1 - c),   upper = (1 + c) / (1 - c).

    The lower bound is only a positivity guarantee when ``c < 1/3``.

    Parameters
    ----------
    c : float
        Decay base, 0 < c < 1.
    d : int
        Matrix dimension; the bounds do not depend on it, but it is kept in
        the signature so callers document the regime they are using.

    Returns
    -------
    (float, float)
        ``(lower, upper)``.

    Raises
    ------
    DomainError
        If ``c`` is outside (0, 1) or ``d < 1``.
    """
    if not 0.0 < c < 1.0:
        raise DomainError(f"bandable decay c must lie in (0, 1), got {c}")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return (1.0 - 3.0 * c) / (1.0 - c), (1.0 + c) / (1.0 - c)


def is_bandable(a, c: float, atol: float = 1e-12) -> bool:
    """Check the entrywise bandable bound ``|A[i, j]| <= c**|i-j|``.

    Parameters
    ----------
    a : array_like, shape (D, D)
        Correlation matrix.
    c : float
        Decay base, 0 < c < 1.
    atol : float
        Slack added to the bound so boundary cases constructed in floating
        point count as bandable.

    Raises
    ------
    DomainError
        If ``c`` is outside (0, 1).
    """
    if not 0.0 < c < 1.0:
        raise DomainError(f"bandable decay c must lie in (0, 1), got {c}")
    m = as_symmetric(a)
    idx = np.arange(m.shape[0])
    offsets = np.abs(idx[:, None] - idx[None, :])
    return bool(np.all(np.abs(m) <= np.power(c, offsets) + atol))
