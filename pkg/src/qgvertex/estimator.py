"""scikit-learn style front end.

``VertexScattering`` is fitted on a coupling matrix ``U`` and then maps
momenta to scattering probabilities (``transform``) or to the
reflection/transmission ratio (``predict``).  ``EquallyTransmittingDesign``
is fitted on a Hermitian unitary MPS matrix ``M`` and builds the coupling
with a prescribed ratio profile.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import numkernel as nk
from .classify import (
    CouplingType,
    classify_coupling,
    design_type_ii,
    design_type_iii,
    design_type_iv,
    rho_curve,
)
from .coupling import VertexCoupling
from .exceptions import NotMPS, VertexError
from .mps import mps_profile
from .scattering import probabilities, s_matrix_closed, s_matrix_direct


def check_momenta(k):
    """Return momenta as a 1-D float array; accepts shape (m,) or (m, 1)."""
    k = np.asarray(k, dtype=float)
    if k.ndim == 2 and k.shape[1] == 1:
        k = k[:, 0]
    if k.ndim != 1 or k.size == 0:
        raise ValueError(f"expected a 1-D array of momenta, got shape {k.shape}")
    if not np.all(np.isfinite(k)) or np.any(k <= 0):
        raise ValueError("momenta must be positive and finite")
    return k


def transmission_label(j, l, n):
    """``T_jl`` with 1-based indices; separated by ``_`` once n reaches 10."""
    sep = "_" if n >= 10 else ""
    return f"T_{j + 1}{sep}{l + 1}"


def probability_feature_names(n):
    names = [f"R_{j}" for j in range(1, n + 1)]
    names += [transmission_label(j, l, n) for j in range(n) for l in range(n) if j != l]
    return names


def flatten_probabilities(S):
    R, T = probabilities(S)
    n = len(R)
    mask = ~np.eye(n, dtype=bool)
    return np.concatenate([R, T[mask]])


class VertexScattering(TransformerMixin, BaseEstimator):
    """Scattering probabilities of a vertex coupling as a function of momentum.

    Parameters
    ----------
    tol : float
        Absolute tolerance for structural checks.
    method : {"direct", "closed"}
        ``"closed"`` uses the two-eigenvalue form and fails in ``fit`` for
        couplings with three or more eigenvalues.

    Attributes
    ----------
    coupling_ : VertexCoupling
    form_ : TwoEigSpectralForm or None
    class_ : CouplingClass or None
    profile_ : MPSProfile or None
        Set for equally-transmitting couplings.
    n_ : int
    """

    def __init__(self, tol=nk.DEFAULT_TOL, method="direct"):
        self.tol = tol
        self.method = method

    def fit(self, U, y=None):
        if self.method not in ("direct", "closed"):
            raise ValueError(f"unknown method {self.method!r}")
        self.coupling_ = U if isinstance(U, VertexCoupling) else VertexCoupling(U, tol=self.tol)
        self.n_ = self.coupling_.n
        self.form_, self.class_, self.profile_ = None, None, None
        try:
            self.form_, self.class_ = classify_coupling(self.coupling_, self.tol)
        except VertexError:
            if self.method == "closed":
                raise
        if self.form_ is not None and self.class_.tag is not CouplingType.DECOUPLED and self.n_ > 1:
            self.profile_ = mps_profile(self.form_.M, self.tol)
        return self

    def _s(self, k):
        if self.method == "closed":
            return s_matrix_closed(self.form_, k).S
        return s_matrix_direct(self.coupling_, k, self.tol).S

    def scattering_matrices(self, k):
        check_is_fitted(self, "coupling_")
        return np.stack([self._s(kk) for kk in check_momenta(k)])

    def transform(self, k):
        """Rows ``[R_1..R_n, T_12, T_13, ...]``, one per momentum."""
        check_is_fitted(self, "coupling_")
        return np.stack([flatten_probabilities(self._s(kk)) for kk in check_momenta(k)])

    def predict(self, k):
        """Closed-form reflection/transmission ratio rho(k)."""
        check_is_fitted(self, "coupling_")
        if self.profile_ is None:
            raise NotMPS("rho(k) is defined only for equally-transmitting couplings")
        return rho_curve(self.form_, self.profile_, self.n_, self.tol).evaluate(check_momenta(k))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "coupling_")
        return np.asarray(probability_feature_names(self.n_), dtype=object)


class EquallyTransmittingDesign(BaseEstimator):
    """Build an equally-transmitting coupling on a given MPS matrix ``M``.

    Parameters
    ----------
    kind : {"II", "III", "IV"}
    c : float
        Curvature factor of rho(k).
    sign : {1, -1}
        Branch for types II and III.
    xi : float or None
        Mixing angle for type IV.
    """

    def __init__(self, kind="II", c=1.0, sign=1, xi=None, tol=nk.DEFAULT_TOL):
        self.kind = kind
        self.c = c
        self.sign = sign
        self.xi = xi
        self.tol = tol

    def fit(self, M, y=None):
        M = nk.as_matrix(M, "M")
        profile = mps_profile(M, self.tol)
        if self.kind == "II":
            coupling = design_type_ii(M, profile, self.c, self.sign, tol=self.tol)
        elif self.kind == "III":
            coupling = design_type_iii(M, profile, self.c, self.sign, tol=self.tol)
        elif self.kind == "IV":
            if self.xi is None:
                raise ValueError("type IV design needs xi")
            coupling = design_type_iv(M, profile, self.xi, self.c, tol=self.tol)
        else:
            raise ValueError(f"unknown design kind {self.kind!r}")
        self.coupling_ = coupling
        self.scattering_ = VertexScattering(tol=self.tol).fit(coupling)
        return self

    def predict(self, k):
        check_is_fitted(self, "coupling_")
        return self.scattering_.predict(k)
