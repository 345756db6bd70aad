"""Permutation-symmetric (PS) and modularly permutation-symmetric (MPS) matrices.

An MPS matrix has a common diagonal modulus ``r`` and a common off-diagonal
modulus ``t``; its ratio ``d = r / t`` controls the reflection to
transmission ratio of the couplings built on it.  This module also carries an
exhaustive search over real symmetric sign patterns for Hermitian unitary
MPS matrices of small order.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numkernel as nk
from .exceptions import OrderTooLarge

MAX_SEARCH_ORDER = 6
_CHUNK = 1 << 16


@dataclass(frozen=True)
class MPSProfile:
    r: float
    t: float
    d: float

    @classmethod
    def from_ratio(cls, d, n):
        """Profile of a unitary MPS matrix of order ``n`` with ratio ``d``."""
        t = 1.0 / math.sqrt(d * d + n - 1)
        return cls(d * t, t, float(d))


def is_ps(M, tol=nk.DEFAULT_TOL):
    """Return the common ``(diagonal, off-diagonal)`` values of a PS matrix, else None."""
    M = nk.as_matrix(M, "M")
    n = M.shape[0]
    if n < 2:
        raise ValueError("PS test needs n >= 2")
    off = ~np.eye(n, dtype=bool)
    r, t = M[0, 0], M[0, 1]
    if np.max(np.abs(np.diag(M) - r)) > tol or np.max(np.abs(M[off] - t)) > tol:
        return None
    return complex(r), complex(t)


def mps_profile(M, tol=nk.DEFAULT_TOL, allow_diagonal=False):
    """Return the :class:`MPSProfile` of a non-diagonal MPS matrix, else None.

    With ``allow_diagonal=True`` a diagonal matrix of constant diagonal
    modulus is reported as ``MPSProfile(r, 0.0, inf)`` instead of None.
    """
    M = nk.as_matrix(M, "M")
    n = M.shape[0]
    if n < 2:
        raise ValueError("MPS test needs n >= 2")
    mod = np.abs(M)
    diag = np.diag(mod)
    offd = mod[~np.eye(n, dtype=bool)]
    if np.ptp(diag) > tol or np.ptp(offd) > tol:
        return None
    r, t = float(np.mean(diag)), float(np.mean(offd))
    if t <= tol:
        return MPSProfile(r, 0.0, math.inf) if allow_diagonal else None
    return MPSProfile(r, t, r / t)


def standard_m(n, sign=1):
    """``sign * (-I + (2/n) J)``: the PS Hermitian unitary matrix with maximal d."""
    n = int(n)
    if n < 2:
        raise ValueError("standard_m needs n >= 2")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * (-nk.identity(n) + (2.0 / n) * nk.all_ones(n))


def d_bound(n):
    """Largest ratio d of a Hermitian unitary MPS matrix of order n > 2 (inf for n = 2)."""
    n = int(n)
    if n < 2:
        raise ValueError("d_bound needs n >= 2")
    return math.inf if n == 2 else n / 2 - 1


def is_equally_transmitting(form, tol=nk.DEFAULT_TOL):
    """True iff the spectral matrix M of ``form`` is non-diagonal MPS."""
    if form.n < 2:
        return False
    return mps_profile(form.M, tol) is not None


@dataclass(frozen=True)
class SignMatrix:
    """Sign pattern of a real symmetric candidate M.

    ``offdiag_signs`` is a symmetric tuple of tuples; its diagonal carries no
    meaning and is stored as +1.
    """

    n: int
    diag_signs: tuple
    offdiag_signs: tuple

    @property
    def ratio_free(self):
        # Only order 2 with opposite diagonal signs leaves d unconstrained.
        return self.n == 2 and self.diag_signs[0] != self.diag_signs[1]

    def sign_array(self):
        S = np.array(self.offdiag_signs, dtype=int)
        np.fill_diagonal(S, self.diag_signs)
        return S

    def realize(self, profile):
        """Real matrix with diagonal ``s_j r`` and off-diagonal ``s_jl t``."""
        S = self.sign_array().astype(float)
        M = S * profile.t
        np.fill_diagonal(M, np.asarray(self.diag_signs) * profile.r)
        return M.astype(complex)

    @classmethod
    def from_array(cls, K):
        K = np.asarray(K)
        n = K.shape[0]
        diag = tuple(int(-1 if v < 0 else 1) for v in np.diag(K))
        off = np.where(K < 0, -1, 1)
        np.fill_diagonal(off, 1)
        return cls(n, diag, tuple(tuple(int(v) for v in row) for row in off))


class MPSCandidate(NamedTuple):
    pattern: SignMatrix
    profile: MPSProfile


def _pairs(n):
    return [(j, l) for j in range(n) for l in range(j + 1, n)]


def _decode(indices, n):
    """Signed (chunk, n, n) integer matrices for pattern indices.

    Bits 0..n-1 encode the diagonal signs, the remaining bits the upper
    triangle in row-major order; a set bit means -1.
    """
    pairs = _pairs(n)
    nbits = n + len(pairs)
    bits = (indices[:, None] >> np.arange(nbits)) & 1
    signs = (1 - 2 * bits).astype(np.int16)
    S = np.zeros((indices.size, n, n), dtype=np.int16)
    rows, cols = np.array(pairs).T
    S[:, rows, cols] = signs[:, n:]
    S[:, cols, rows] = signs[:, n:]
    return signs[:, :n], S


def _admissible_chunk(start, stop, n):
    """Return (indices, twice_d) of admissible patterns in [start, stop)."""
    indices = np.arange(start, stop, dtype=np.int64)
    diag, off = _decode(indices, n)
    sigma = np.matmul(off, off)
    rows, cols = np.array(_pairs(n)).T
    sig = sigma[:, rows, cols].astype(np.int64)
    den = (diag[:, rows] + diag[:, cols]).astype(np.int64)
    own = off[:, rows, cols].astype(np.int64)
    # (M^2)_jl = t^2 (s_jl (s_j + s_l) d + sigma_jl); den = s_j + s_l in {-2, 0, 2}
    twice_d = -sig * own * (den // 2)
    constrained = den != 0
    free_ok = np.all((sig == 0) | constrained, axis=1)
    big = np.iinfo(np.int64).max
    lo = np.where(constrained, twice_d, big).min(axis=1)
    hi = np.where(constrained, twice_d, -big).max(axis=1)
    any_constrained = constrained.any(axis=1)
    determined = any_constrained & (lo == hi) & (lo >= 0)
    unconstrained = ~any_constrained
    ok = free_ok & (determined | unconstrained)
    twice = np.where(any_constrained, lo, -1)
    return indices[ok], twice[ok]


def _canonical_matrix(diag_signs, off, d_zero):
    K = off.astype(int).copy()
    np.fill_diagonal(K, 0 if d_zero else diag_signs)
    return K


def _orbit(K, perms):
    """All images of K under simultaneous permutation and global sign flip."""
    images = K[perms[:, :, None], perms[:, None, :]]
    return np.concatenate([images, -images])


def _encode(images, n, d_zero):
    """Pattern indices of signed matrices; zero diagonals expand to all diag signs."""
    pairs = _pairs(n)
    rows, cols = np.array(pairs).T
    off_bits = (images[:, rows, cols] < 0).astype(np.int64)
    weights = np.left_shift(1, np.arange(n, n + len(pairs), dtype=np.int64))
    base = off_bits @ weights
    if d_zero:
        diag_codes = np.arange(1 << n, dtype=np.int64)
        return (base[:, None] | diag_codes[None, :]).ravel()
    diag_bits = (np.diagonal(images, axis1=1, axis2=2) < 0).astype(np.int64)
    return base | (diag_bits @ np.left_shift(1, np.arange(n, dtype=np.int64)))


def search_real_mps(n, tol=nk.DEFAULT_TOL, workers=None):
    """Enumerate real Hermitian unitary MPS sign patterns of order ``n``.

    Every symmetric sign pattern is tested analytically: ``M @ M = I`` forces,
    for each off-diagonal entry, ``s_jl (s_j + s_l) d + sum_m s_jm s_ml = 0``.  A
    pattern is kept when these conditions agree on one ``d >= 0``.  Results
    are deduplicated up to simultaneous row/column permutation and a global
    sign flip (diagonal signs are ignored when ``d = 0``), and sorted by ``d`` descending then canonical pattern.

    For ``n = 2`` with opposite diagonal signs ``d`` is unconstrained; that
    family is reported once, realized at ``d = 1``, with ``ratio_free`` set.
    """
    n = int(n)
    if n > MAX_SEARCH_ORDER:
        raise OrderTooLarge(f"exhaustive search supports n <= {MAX_SEARCH_ORDER}, got {n}")
    if n < 2:
        raise ValueError("search needs n >= 2")
    total = 1 << (n + n * (n - 1) // 2)
    bounds = [(s, min(s + _CHUNK, total)) for s in range(0, total, _CHUNK)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _admissible_chunk(b[0], b[1], n), bounds))
    else:
        parts = [_admissible_chunk(a, b, n) for a, b in bounds]
    indices = np.concatenate([p[0] for p in parts])
    twice_d = np.concatenate([p[1] for p in parts])

    perms = np.array(list(itertools.permutations(range(n))))
    # twice d per admissible index (-1: d free, -2: not admissible)
    ratio_of = np.full(total, -2, dtype=np.int64)
    ratio_of[indices] = twice_d
    seen = np.zeros(total, dtype=bool)
    found = []
    diag_all, off_all = _decode(indices, n)
    for k, idx in enumerate(indices):
        if seen[idx]:
            continue
        ratio_free = twice_d[k] < 0
        d = 1.0 if ratio_free else twice_d[k] / 2
        d_zero = d == 0
        K = _canonical_matrix(diag_all[k], off_all[k], d_zero)
        images = _orbit(K, perms)
        members = _encode(images, n, d_zero)
        seen[members[ratio_of[members] == twice_d[k]]] = True
        flat = images.reshape(len(images), -1)
        best = min(map(tuple, flat))
        found.append((d, best))

    results = []
    for d, key in sorted(found, key=lambda item: (-item[0], item[1])):
        K = np.array(key).reshape(n, n)
        pattern = SignMatrix.from_array(K)
        profile = MPSProfile.from_ratio(d, n)
        M = pattern.realize(profile)
        if not (nk.is_hermitian_unitary(M, tol) and mps_profile(M, tol) is not None):
            raise AssertionError(f"search produced an invalid matrix for pattern {key}")
        results.append(MPSCandidate(pattern, profile))
    return results


def verify_bound(n, results):
    """True iff no profile exceeds ``n/2 - 1`` and at least one attains it."""
    n = int(n)
    if not 2 < n <= MAX_SEARCH_ORDER:
        raise ValueError("bound verification applies to 2 < n <= 6")
    bound = n / 2 - 1
    ds = [c.profile.d for c in results]
    return bool(ds) and max(ds) <= bound + 1e-12 and any(abs(d - bound) <= 1e-12 for d in ds)


def canonical_key(M, tol=nk.DEFAULT_TOL):
    """Canonical sign pattern of a real MPS matrix, comparable with search output."""
    M = nk.as_matrix(M, "M")
    profile = mps_profile(M, tol)
    if profile is None or np.max(np.abs(M.imag)) > tol:
        return None
    n = M.shape[0]
    K = np.sign(M.real).astype(int)
    d_zero = profile.d <= tol
    if d_zero:
        np.fill_diagonal(K, 0)
    perms = np.array(list(itertools.permutations(range(n))))
    return min(map(tuple, _orbit(K, perms).reshape(-1, n * n)))


def pattern_key(candidate):
    """Canonical key of a search result (matches :func:`canonical_key`)."""
    K = candidate.pattern.sign_array()
    if candidate.profile.d == 0:
        np.fill_diagonal(K, 0)
    return tuple(K.ravel())


def random_hermitian_unitary(n, rng, rank=None):
    """Haar-random Hermitian unitary ``2P - I`` with ``P`` of the given rank."""
    rng = np.random.default_rng(rng)
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Qm, R = np.linalg.qr(Z)
    Qm = Qm * (np.diag(R) / np.abs(np.diag(R)))
    if rank is None:
        rank = int(rng.integers(1, n)) if n > 1 else 1
    V = Qm[:, :rank]
    return 2 * V @ V.conj().T - np.eye(n)


def random_conjugate(M, rng):
    """Conjugate M by a random diagonal phase and a random permutation.

    Both operations preserve Hermiticity, unitarity and the moduli of the
    entries, so MPS profiles are unchanged.
    """
    rng = np.random.default_rng(rng)
    n = M.shape[0]
    phases = np.exp(1j * rng.uniform(-np.pi, np.pi, size=n))
    D = np.diag(phases)
    P = nk.permutation_matrix(rng.permutation(n))
    return P @ D @ M @ D.conj().T @ P.T


def random_mps_hermitian_unitary(n, rng, catalog=None):
    """Random complex Hermitian unitary MPS matrix built from a search result."""
    rng = np.random.default_rng(rng)
    catalog = catalog if catalog is not None else search_real_mps(n)
    cand = catalog[int(rng.integers(len(catalog)))]
    return random_conjugate(cand.pattern.realize(cand.profile), rng), cand.profile


def hadamard_m4():
    """Symmetric 4x4 Sylvester-Hadamard matrix scaled to be Hermitian unitary (d = 1)."""
    H2 = np.array([[1, 1], [1, -1]])
    return np.kron(H2, H2).astype(complex) / 2
