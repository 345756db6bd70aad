"""Scattering classes of two-eigenvalue couplings and inverse design.

For an equally-transmitting coupling (MPS ``M`` with ratio ``d``) the
reflection/transmission ratio is

    rho(k) = d^2 + (d^2 + n - 1) (cc k + ss / k)^2 / sin^2((alpha - beta)/2)

with ``cc = cos(alpha/2) cos(beta/2)`` and ``ss = sin(alpha/2) sin(beta/2)``.
Which of ``cc`` and ``ss`` vanish decides the class:

========  =====================  ===========================
class     phases                 rho(k)
========  =====================  ===========================
I         {alpha, beta} = {0,pi}  d^2
II        beta = pi               d^2 + c / k^2
III       alpha = 0               d^2 + c k^2
IV        neither in {0, pi}      d^2 + c (cos xi k + sin xi / k)^2
========  =====================  ===========================
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numkernel as nk
from .coupling import decompose, from_spectral, is_decoupled
from .exceptions import COutOfRange, DegenerateForm, InvalidXi, NotMPS
from .mps import mps_profile
from .scattering import _half_angle_terms


class CouplingType(str, enum.Enum):
    DECOUPLED = "Decoupled"
    TYPE_I = "TypeI_ScaleInvariant"
    TYPE_II = "TypeII_GeneralizedDelta"
    TYPE_III = "TypeIII_GeneralizedDeltaPrime"
    TYPE_IV = "TypeIV_Mixed"
    OUTSIDE = "OutsideFamily"


@dataclass(frozen=True)
class CouplingClass:
    tag: CouplingType
    gamma: Optional[float] = None
    gamma_prime: Optional[float] = None
    xi: Optional[float] = None
    c: Optional[float] = None


@dataclass(frozen=True)
class RhoCurve:
    d_squared: float
    scale: float
    cc: float
    ss: float

    def evaluate(self, k):
        k = np.asarray(k, dtype=float)
        return self.d_squared + self.scale * (self.cc * k + self.ss / k) ** 2

    @property
    def c(self):
        """Prefactor of the unit-normalized bracket ``(cos xi k + sin xi / k)^2``."""
        return self.scale * (self.cc**2 + self.ss**2)


@dataclass(frozen=True)
class Interval:
    """The interval ``(lower, upper]`` (open at ``upper`` when it is infinite)."""

    lower: float
    upper: float

    @property
    def upper_closed(self):
        return math.isfinite(self.upper)

    def __contains__(self, value):
        if not value > self.lower:
            return False
        return value <= self.upper if self.upper_closed else value < self.upper

    def __str__(self):
        if self.upper_closed:
            return f"({self.lower!r}, {self.upper!r}]"
        return f"({self.lower!r}, +inf)"


def _scale(alpha, beta, d, n):
    return (d * d + n - 1) / math.sin((alpha - beta) / 2) ** 2


def classify(form, coupling_is_diagonal, n, tol=nk.DEFAULT_TOL):
    """Assign the scattering class of a decomposed coupling.

    ``form`` must come from :func:`~qgvertex.coupling.decompose` so phases are
    canonically ordered and snapped.  The curvature factor ``c`` is filled in
    only when ``form.M`` is MPS (it depends on the ratio ``d``).
    """
    if coupling_is_diagonal or form.degenerate:
        return CouplingClass(CouplingType.DECOUPLED)
    alpha, beta = form.alpha, form.beta
    special = (0.0, math.pi)
    if {alpha, beta} == set(special):
        return CouplingClass(CouplingType.TYPE_I)

    profile = mps_profile(form.M, tol) if n >= 2 else None
    c = None
    if profile is not None:
        cc, ss = _half_angle_terms(alpha, beta)
        c = _scale(alpha, beta, profile.d, n) * (cc * cc + ss * ss)

    if beta == math.pi and alpha not in special:
        return CouplingClass(CouplingType.TYPE_II, gamma=-n * math.tan(alpha / 2), c=c)
    if alpha == 0.0 and beta not in special:
        return CouplingClass(CouplingType.TYPE_III, gamma_prime=-n / math.tan(beta / 2), c=c)
    xi = math.atan(math.tan(alpha / 2) * math.tan(beta / 2))
    return CouplingClass(CouplingType.TYPE_IV, xi=xi, c=c)


def classify_coupling(coupling, tol=nk.DEFAULT_TOL):
    """Decompose and classify in one call; returns ``(form, CouplingClass)``."""
    form = decompose(coupling, tol)
    return form, classify(form, is_decoupled(coupling, tol), coupling.n, tol)


def _resolve_profile(M, profile, tol):
    found = mps_profile(M, tol)
    if found is None:
        raise NotMPS("M is not a non-diagonal MPS matrix")
    if profile is not None and abs(profile.d - found.d) > 1e-8 * max(1.0, found.d):
        raise NotMPS(f"profile ratio {profile.d!r} does not match M (d = {found.d!r})")
    return found


def rho_curve(form, profile=None, n=None, tol=nk.DEFAULT_TOL):
    """Closed-form reflection/transmission ratio of an equally-transmitting coupling."""
    if form.degenerate or form.alpha == form.beta:
        raise DegenerateForm("rho(k) needs two distinct eigenvalues")
    n = form.n if n is None else int(n)
    profile = _resolve_profile(form.M, profile, tol)
    cc, ss = _half_angle_terms(form.alpha, form.beta)
    return RhoCurve(profile.d**2, _scale(form.alpha, form.beta, profile.d, n), cc, ss)


def _check_xi(xi):
    xi = float(xi)
    if not -math.pi / 2 < xi < math.pi / 2 or xi == 0.0:
        raise InvalidXi(f"xi must lie in (-pi/2, pi/2) without 0, got {xi!r}")
    return xi


def c_range(xi, d, n):
    """Admissible curvature factors of mixed couplings with angle ``xi`` and ratio ``d``."""
    tan_xi = math.tan(_check_xi(xi))
    if tan_xi > 0:
        return Interval(0.0, math.inf)
    return Interval(0.0, (d * d + n - 1) * (1 + tan_xi**2) / (4 * abs(tan_xi)))


def _check_design(M, profile, c, sign, tol):
    M = nk.as_matrix(M, "M")
    profile = _resolve_profile(M, profile, tol)
    if not c > 0:
        raise ValueError(f"c must be positive, got {c!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return M, profile


def design_type_ii(M, profile, c, sign, n=None, tol=nk.DEFAULT_TOL):
    """Generalized delta coupling with ``rho(k) = d^2 + c / k^2``."""
    M, profile = _check_design(M, profile, c, sign, tol)
    n = M.shape[0] if n is None else int(n)
    alpha = sign * 2 * math.atan(math.sqrt(c / (profile.d**2 + n - 1)))
    return from_spectral(alpha, math.pi, M, tol)


def design_type_iii(M, profile, c, sign, n=None, tol=nk.DEFAULT_TOL):
    """Generalized delta-prime coupling with ``rho(k) = d^2 + c k^2``."""
    M, profile = _check_design(M, profile, c, sign, tol)
    n = M.shape[0] if n is None else int(n)
    cot_half = sign * math.sqrt(c / (profile.d**2 + n - 1))
    beta = 2 * math.atan(1 / cot_half)
    return from_spectral(0.0, beta, M, tol)


def design_type_iv(M, profile, xi, c, n=None, tol=nk.DEFAULT_TOL):
    """Mixed coupling with angle ``xi`` and curvature factor ``c``.

    With ``T = tan(alpha/2)`` the constraint ``tan(alpha/2) tan(beta/2) = tan xi``
    turns the requested ``c`` into ``T^2 - u T - tan xi = 0``; the root of
    larger modulus is used.

    Raises:
        COutOfRange: ``c`` is not in :func:`c_range`.
    """
    M, profile = _check_design(M, profile, c, 1, tol)
    n = M.shape[0] if n is None else int(n)
    interval = c_range(xi, profile.d, n)
    if c not in interval:
        raise COutOfRange(c, interval)
    tan_xi = math.tan(xi)
    u = math.sqrt((1 + tan_xi**2) * (profile.d**2 + n - 1) / c)
    disc = max(u * u + 4 * tan_xi, 0.0)
    T = (u + math.sqrt(disc)) / 2
    alpha = 2 * math.atan(T)
    beta = 2 * math.atan(tan_xi / T)
    return from_spectral(alpha, beta, M, tol)
