"""Momentum-dependent scattering matrices of a vertex coupling.

Two independent evaluation paths are provided and kept separate on purpose:

* :func:`s_matrix_direct` inverts ``(k-1)U + (k+1)I`` for any unitary ``U``;
* :func:`s_matrix_closed` uses ``S(k) = mu(k) I + nu(k) M`` which holds when
  ``U`` has at most two eigenvalues.

Units are ``hbar = 2m = 1`` so ``k`` is both momentum and sqrt(energy).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .exceptions import DegenerateForm, ZeroReference


@dataclass(frozen=True, eq=False)
class ScatteringResult:
    k: float
    S: np.ndarray
    reflections: np.ndarray
    transmissions: np.ndarray

    @classmethod
    def from_matrix(cls, k, S):
        R, T = probabilities(S)
        return cls(float(k), S, R, T)

    @property
    def unitarity_residual(self):
        return nk.unitarity_residual(self.S)

    def conservation_residual(self):
        """Largest deviation of a probability row sum from 1."""
        return float(np.max(np.abs(self.reflections + self.transmissions.sum(axis=1) - 1)))


@dataclass(frozen=True)
class MuNu:
    mu: complex
    nu: complex


def _check_k(k):
    k = float(k)
    if not (k > 0 and math.isfinite(k)):
        raise ValueError(f"momentum must be positive and finite, got {k!r}")
    return k


def k_grid(k_min=1e-2, k_max=1e2, points=61, log_spacing=True):
    """Sorted momentum grid; 61 log-spaced points on [0.01, 100] by default."""
    k_min, k_max = _check_k(k_min), _check_k(k_max)
    if not k_min < k_max:
        raise ValueError("k_min must be smaller than k_max")
    if points < 2:
        raise ValueError("a grid needs at least two points")
    if log_spacing:
        return np.logspace(math.log10(k_min), math.log10(k_max), int(points))
    return np.linspace(k_min, k_max, int(points))


def cayley_s(U, k, tol=nk.DEFAULT_TOL):
    """``[(k-1)U + (k+1)I]^-1 [(k+1)U + (k-1)I]`` for a raw matrix ``U``."""
    k = _check_k(k)
    U = nk.as_matrix(U, "U")
    I = np.eye(U.shape[0])
    return nk.solve_linear((k - 1) * U + (k + 1) * I, (k + 1) * U + (k - 1) * I, tol)


def s_matrix_direct(coupling, k, tol=nk.DEFAULT_TOL):
    return ScatteringResult.from_matrix(k, cayley_s(coupling.U, k, tol))


def _half_angle_terms(alpha, beta):
    """cos(a/2)cos(b/2) and sin(a/2)sin(b/2), exact at phases 0 and pi."""

    def cos_half(x):
        return 0.0 if x == math.pi else math.cos(x / 2)

    def sin_half(x):
        return 0.0 if x == 0.0 else math.sin(x / 2)

    return cos_half(alpha) * cos_half(beta), sin_half(alpha) * sin_half(beta)


def _mu_nu(alpha, beta, k):
    cc, ss = _half_angle_terms(alpha, beta)
    denom = k * cc - ss / k - 1j * math.sin((alpha + beta) / 2)
    mu = (k * cc + ss / k) / denom
    nu = 1j * math.sin((alpha - beta) / 2) / denom
    return complex(mu), complex(nu)


def mu_nu(form, k):
    """Coefficients of ``S(k) = mu I + nu M`` for a non-degenerate form."""
    k = _check_k(k)
    if form.degenerate or form.alpha == form.beta:
        raise DegenerateForm("mu/nu split needs two distinct eigenvalues")
    return MuNu(*_mu_nu(form.alpha, form.beta, k))


def s_matrix_closed(form, k):
    k = _check_k(k)
    mu, nu = _mu_nu(form.alpha, form.beta, k)
    S = mu * np.eye(form.n) + nu * form.M
    return ScatteringResult.from_matrix(k, S)


def probabilities(S):
    """Reflection probabilities ``|S_jj|^2`` and transmissions ``|S_jl|^2`` (zero diagonal)."""
    P = np.abs(np.asarray(S)) ** 2
    R = np.diag(P).copy()
    T = P.copy()
    np.fill_diagonal(T, 0.0)
    return R, T


def transmission_ratio_profile(form, k_grid, reference=(0, 1), tol=nk.DEFAULT_TOL):
    """``|S(k)_jl| / |S(k)_ref|`` for every off-diagonal ``(j, l)`` over ``k_grid``.

    Returns an ``(n, n, len(k_grid))`` array with NaN on the diagonal.  For a
    two-eigenvalue coupling every slice is constant in ``k``.
    """
    j0, l0 = reference
    if j0 == l0:
        raise ValueError("reference must be an off-diagonal position")
    if abs(form.M[j0, l0]) <= tol:
        raise ZeroReference(f"M[{j0}, {l0}] vanishes; pick another reference pair")
    n = form.n
    out = np.empty((n, n, len(k_grid)))
    for idx, k in enumerate(k_grid):
        S = s_matrix_closed(form, k).S
        out[:, :, idx] = np.abs(S) / abs(S[j0, l0])
    out[np.arange(n), np.arange(n), :] = np.nan
    return out
