"""Dense complex matrix helpers and tolerance-aware structural predicates.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every predicate
takes an explicit absolute tolerance ``tol``; entrywise claims use the max
norm and residuals use the Frobenius norm.
"""

import warnings

import numpy as np
from scipy import linalg

from .exceptions import DimensionMismatch, SingularMatrix

DEFAULT_TOL = 1e-10
MAX_ORDER = 64


def check_tol(tol):
    """Validate an absolute tolerance and return it as a float."""
    tol = float(tol)
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tol!r}")
    return tol


def as_matrix(A, name="matrix"):
    """Return ``A`` as a finite square complex array of order 1..MAX_ORDER."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    n = A.shape[0]
    if not 1 <= n <= MAX_ORDER:
        raise DimensionMismatch(f"{name} order must be in 1..{MAX_ORDER}, got {n}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def _same_order(A, B):
    if A.shape != B.shape:
        raise DimensionMismatch(f"order mismatch: {A.shape} vs {B.shape}")


def identity(n):
    return np.eye(_order(n), dtype=complex)


def all_ones(n):
    return np.ones((_order(n), _order(n)), dtype=complex)


def _order(n):
    n = int(n)
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {n}")
    return n


def mat_mul(A, B):
    A, B = as_matrix(A), as_matrix(B)
    _same_order(A, B)
    return A @ B


def solve_linear(A, B, tol=DEFAULT_TOL):
    """Solve ``A X = B`` by partially pivoted LU.

    ``B`` may have any number of columns.  Raises :class:`SingularMatrix`
    when a pivot of the factorization has modulus below ``tol``.
    """
    A = as_matrix(A, "A")
    B = np.asarray(B, dtype=complex)
    if B.ndim not in (1, 2) or B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"right-hand side shape {B.shape} does not match order {A.shape[0]}")
    tol = check_tol(tol)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(A, check_finite=False)
    smallest = np.min(np.abs(np.diag(lu)))
    if smallest <= tol:
        raise SingularMatrix(f"pivot of modulus {smallest:.3e} below tolerance {tol:.1e}")
    return linalg.lu_solve((lu, piv), B, check_finite=False)


def frobenius_inner(A, B):
    """Return trace(A^dagger B)."""
    A, B = np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)
    _same_order(A, B)
    return complex(np.vdot(A, B))


def max_norm(A):
    return float(np.max(np.abs(A))) if np.size(A) else 0.0


def unitarity_residual(A):
    A = np.asarray(A, dtype=complex)
    return max_norm(A @ A.conj().T - np.eye(A.shape[0]))


def is_unitary(A, tol=DEFAULT_TOL):
    return unitarity_residual(as_matrix(A)) <= tol


def is_hermitian(A, tol=DEFAULT_TOL):
    A = as_matrix(A)
    return max_norm(A - A.conj().T) <= tol


def is_diagonal(A, tol=DEFAULT_TOL):
    A = as_matrix(A)
    return max_norm(A - np.diag(np.diag(A))) <= tol


def is_hermitian_unitary(A, tol=DEFAULT_TOL):
    return is_hermitian(A, tol) and is_unitary(A, tol)


def permutation_matrix(perm):
    perm = np.asarray(perm)
    P = np.zeros((perm.size, perm.size), dtype=complex)
    P[np.arange(perm.size), perm] = 1.0
    return P
