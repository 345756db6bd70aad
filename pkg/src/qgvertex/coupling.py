"""Vertex couplings and their two-eigenvalue spectral form.

A coupling is represented by its unitary matrix ``U``.  When ``U`` has at
most two eigenvalues ``exp(i*alpha)`` and ``exp(i*beta)`` it can be written as

    U = exp(i(a+b)/2) * (cos((a-b)/2) I + i sin((a-b)/2) M)

with ``M`` Hermitian unitary; :func:`decompose` recovers ``(alpha, beta, M)``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from .exceptions import (
    DegenerateGram,
    MoreThanTwoEigenvalues,
    NotHermitianUnitary,
    NotUnitary,
    NotUnitaryPS,
    NumericalInconsistency,
)

# Phases within this distance of 0 or pi are snapped onto them.
PHASE_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class VertexCoupling:
    """Unitary coupling matrix ``U`` of a vertex of degree ``n``."""

    U: np.ndarray
    tol: float = field(default=nk.DEFAULT_TOL, repr=False)

    def __post_init__(self):
        U = nk.as_matrix(self.U, "U").copy()
        tol = nk.check_tol(self.tol)
        residual = nk.unitarity_residual(U)
        if residual > tol:
            raise NotUnitary(f"U is not unitary (max residual {residual:.3e} > {tol:.1e})")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)

    @property
    def n(self):
        return self.U.shape[0]


@dataclass(frozen=True, eq=False)
class TwoEigSpectralForm:
    """Phases ``alpha``, ``beta`` and Hermitian unitary ``M``.

    ``M = 2P - I`` where ``P`` projects onto the ``exp(i*alpha)`` eigenspace
    of rank ``multiplicity_p``.  A degenerate form (scalar ``U``) has
    ``beta == alpha`` and ``M = I``.
    """

    alpha: float
    beta: float
    M: np.ndarray
    multiplicity_p: int
    degenerate: bool = False

    @property
    def n(self):
        return self.M.shape[0]

    @property
    def P(self):
        return (self.M + np.eye(self.n)) / 2

    @property
    def Q(self):
        return (np.eye(self.n) - self.M) / 2

    def to_matrix(self):
        return spectral_matrix(self.alpha, self.beta, self.M)


def wrap_phase(phase):
    """Map a phase into (-pi, pi], snapping to 0 or pi within PHASE_SNAP."""
    phase = math.remainder(float(phase), 2 * math.pi)
    if abs(phase) <= PHASE_SNAP:
        return 0.0
    if math.pi - abs(phase) <= PHASE_SNAP:
        return math.pi
    return phase


def _check_phase(name, value):
    if not -math.pi < value <= math.pi:
        raise ValueError(f"{name} must lie in (-pi, pi], got {value!r}")


def spectral_matrix(alpha, beta, M):
    n = M.shape[0]
    half_diff = (alpha - beta) / 2
    return np.exp(0.5j * (alpha + beta)) * (
        math.cos(half_diff) * np.eye(n) + 1j * math.sin(half_diff) * M
    )


def from_spectral(alpha, beta, M, tol=nk.DEFAULT_TOL):
    """Build the coupling with eigenphases ``alpha`` (on P) and ``beta`` (on I - P)."""
    alpha, beta = float(alpha), float(beta)
    _check_phase("alpha", alpha)
    _check_phase("beta", beta)
    M = nk.as_matrix(M, "M")
    if not nk.is_hermitian_unitary(M, tol):
        raise NotHermitianUnitary("M must be Hermitian and unitary")
    return VertexCoupling(spectral_matrix(alpha, beta, M), tol=tol)


def _centered_fit(U):
    """Closure fit in the orthogonal basis {V, I}, V = U - mean(eig) I.

    Returns ``(lam, s_c, t_c, residual)`` with ``V @ V ~ s_c V + t_c I``.
    The basis spans the same space as {U, I}, so the minimizer is the same,
    but the Gram matrix is diagonal and the fit stays accurate when the two
    eigenvalues are close.
    """
    n = U.shape[0]
    I = np.eye(n)
    lam = np.trace(U) / n
    V = U - lam * I
    V2 = V @ V
    vv = nk.frobenius_inner(V, V).real
    s_c = nk.frobenius_inner(V, V2) / vv
    t_c = np.trace(V2) / n
    residual = float(np.linalg.norm(V2 - s_c * V - t_c * I))
    return complex(lam), complex(s_c), complex(t_c), residual


def quadratic_closure_fit(U, tol=nk.DEFAULT_TOL):
    """Least-squares fit of ``U @ U ~ s U + t I`` in the Frobenius inner product.

    Returns ``(s, t, residual)`` where ``residual`` is the minimized Frobenius
    norm.  A zero residual certifies that ``U`` has at most two eigenvalues.

    Raises:
        DegenerateGram: ``U`` is a scalar multiple of the identity.
    """
    U = nk.as_matrix(U, "U")
    if _scalar_part(U, tol) is not None:
        raise DegenerateGram("U is a scalar multiple of I; the Gram system is singular")
    lam, s_c, t_c, residual = _centered_fit(U)
    # (V + lam)^2 - s (V + lam) - t  ==  V^2 - s_c V - t_c
    s = s_c + 2 * lam
    t = t_c - s * lam + lam * lam
    return complex(s), complex(t), residual


def _scalar_part(U, tol):
    """Return lambda when ``U = lambda I`` within tol, else None."""
    lam = np.trace(U) / U.shape[0]
    if nk.max_norm(U - lam * np.eye(U.shape[0])) <= tol:
        return complex(lam)
    return None


def _canonical_order(alpha, beta):
    return (abs(alpha), alpha) <= (abs(beta), beta)


def decompose(coupling, tol=nk.DEFAULT_TOL):
    """Recover the two-eigenvalue spectral form of a coupling.

    Phases are ordered so that ``|alpha| <= |beta|`` (ties: ``alpha <= beta``)
    and snapped to exactly 0 or pi when within ``PHASE_SNAP``.

    Raises:
        MoreThanTwoEigenvalues: the closure residual exceeds ``tol * n``.
        NumericalInconsistency: recovered eigenvalues leave the unit circle or
            the recovered ``M`` is not Hermitian unitary.
    """
    tol = nk.check_tol(tol)
    U = coupling.U
    n = U.shape[0]
    lam = _scalar_part(U, tol)
    if lam is not None:
        phase = wrap_phase(np.angle(lam))
        return TwoEigSpectralForm(phase, phase, np.eye(n, dtype=complex), n, degenerate=True)

    lam, s_c, t_c, residual = _centered_fit(U)
    if residual > tol * n:
        raise MoreThanTwoEigenvalues(residual)

    root = np.sqrt(s_c * s_c + 4 * t_c)
    v1, v2 = (s_c + root) / 2, (s_c - root) / 2
    z1, z2 = lam + v1, lam + v2
    for z in (z1, z2):
        if abs(abs(z) - 1) > 10 * tol:
            raise NumericalInconsistency(f"eigenvalue {z} is off the unit circle")
    a1, a2 = wrap_phase(np.angle(z1)), wrap_phase(np.angle(z2))
    if not _canonical_order(a1, a2):
        a1, a2 = a2, a1
        v1, v2 = v2, v1
    if a1 == a2:
        raise NumericalInconsistency("closure fit produced coincident eigenvalues")

    P = (U - lam * np.eye(n) - v2 * np.eye(n)) / (v1 - v2)
    M = 2 * P - np.eye(n)
    if not nk.is_hermitian_unitary(M, tol):
        raise NumericalInconsistency("recovered M is not Hermitian unitary")
    M = (M + M.conj().T) / 2
    trace_p = np.trace(P).real
    multiplicity = int(round(trace_p))
    if abs(trace_p - multiplicity) > tol * n or not 0 < multiplicity < n:
        raise NumericalInconsistency(f"trace of the projector {trace_p!r} is not an integer")
    M.setflags(write=False)
    return TwoEigSpectralForm(a1, a2, M, multiplicity)


def from_ps(a, b, n, tol=nk.DEFAULT_TOL):
    """Permutation-symmetric coupling ``U = a I + b J``."""
    n = int(n)
    a, b = complex(a), complex(b)
    if abs(abs(a) - 1) > tol or abs(abs(a + n * b) - 1) > tol:
        raise NotUnitaryPS(f"|a| = {abs(a)!r} and |a + n b| = {abs(a + n * b)!r} must both be 1")
    return VertexCoupling(a * nk.identity(n) + b * nk.all_ones(n), tol=tol)


class CouplingKind(str, enum.Enum):
    FREE = "Free"
    DELTA = "Delta"
    DELTA_PRIME_S = "DeltaPrimeS"
    DELTA_PRIME = "DeltaPrime"
    DELTA_P = "DeltaP"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).replace("_", "").replace("-", "").lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown coupling kind {name!r}")


def table1_coefficients(kind, param, n):
    """Return ``(a, b)`` of the standard permutation-symmetric couplings."""
    kind = CouplingKind.parse(kind)
    g = float(param)
    if kind is CouplingKind.FREE:
        return -1.0 + 0j, 2.0 / n + 0j
    if kind is CouplingKind.DELTA:
        return -1.0 + 0j, 2 / (n + 1j * g)
    if kind is CouplingKind.DELTA_PRIME_S:
        return 1.0 + 0j, -2 / (n - 1j * g)
    if kind is CouplingKind.DELTA_PRIME:
        return -(n + 1j * g) / (n - 1j * g), 2 / (n - 1j * g)
    return (n - 1j * g) / (n + 1j * g), -2 / (n + 1j * g)


def table1(kind, param, n, tol=nk.DEFAULT_TOL):
    n = int(n)
    if n < 2:
        raise ValueError("standard couplings need n >= 2")
    a, b = table1_coefficients(kind, param, n)
    return from_ps(a, b, n, tol)


def is_decoupled(coupling, tol=nk.DEFAULT_TOL):
    return nk.is_diagonal(coupling.U, tol)
