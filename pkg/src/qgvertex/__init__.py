"""Two-eigenvalue quantum graph vertex couplings and equally-transmitting design."""

from .classify import (
    CouplingClass,
    CouplingType,
    Interval,
    RhoCurve,
    c_range,
    classify,
    classify_coupling,
    design_type_ii,
    design_type_iii,
    design_type_iv,
    rho_curve,
)
from .coupling import (
    CouplingKind,
    TwoEigSpectralForm,
    VertexCoupling,
    decompose,
    from_ps,
    from_spectral,
    is_decoupled,
    quadratic_closure_fit,
    table1,
)
from .estimator import EquallyTransmittingDesign, VertexScattering
from .mps import (
    MPSProfile,
    SignMatrix,
    d_bound,
    is_equally_transmitting,
    is_ps,
    mps_profile,
    search_real_mps,
    standard_m,
    verify_bound,
)
from .numkernel import DEFAULT_TOL
from .scattering import (
    MuNu,
    ScatteringResult,
    k_grid,
    mu_nu,
    probabilities,
    s_matrix_closed,
    s_matrix_direct,
    transmission_ratio_profile,
)

__version__ = "0.1.0"

__all__ = [
    "c_range",
    "classify",
    "classify_coupling",
    "CouplingClass",
    "CouplingKind",
    "CouplingType",
    "d_bound",
    "decompose",
    "DEFAULT_TOL",
    "design_type_ii",
    "design_type_iii",
    "design_type_iv",
    "EquallyTransmittingDesign",
    "from_ps",
    "from_spectral",
    "Interval",
    "is_decoupled",
    "is_equally_transmitting",
    "is_ps",
    "k_grid",
    "mps_profile",
    "MPSProfile",
    "mu_nu",
    "MuNu",
    "probabilities",
    "quadratic_closure_fit",
    "rho_curve",
    "RhoCurve",
    "s_matrix_closed",
    "s_matrix_direct",
    "ScatteringResult",
    "search_real_mps",
    "SignMatrix",
    "standard_m",
    "table1",
    "transmission_ratio_profile",
    "TwoEigSpectralForm",
    "verify_bound",
    "VertexCoupling",
    "VertexScattering",
]
