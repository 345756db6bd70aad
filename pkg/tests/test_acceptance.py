"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are repeated
in the "acceptance criteria" section of the terminal summary.
"""

import importlib
import math

import numpy as np
import pytest

from qgvertex import coupling as cp
from qgvertex import mps
from qgvertex import numkernel as nk
from qgvertex import scattering as sc
from qgvertex.exceptions import COutOfRange

from conftest import record_acceptance

cl = importlib.import_module("qgvertex.classify")
pytestmark = pytest.mark.acceptance

PI = math.pi
GRID = sc.k_grid()
SEED = 7321


def random_ps_factor(n, rng):
    phi, psi = rng.uniform(-PI, PI, size=2)
    a = np.exp(1j * phi)
    return cp.from_ps(a, (np.exp(1j * psi) - a) / n, n).U


def random_unitary_from_factors(n, rng, factors=4):
    U = np.eye(n, dtype=complex)
    for _ in range(factors):
        P = nk.permutation_matrix(rng.permutation(n))
        U = U @ random_ps_factor(n, rng) @ P
    return U


def random_two_eig(rng):
    n = int(rng.integers(2, 9))
    M = mps.random_hermitian_unitary(n, rng)
    while True:
        a, b = rng.uniform(-PI, PI, size=2)
        if abs(a - b) > 0.1:
            return cp.from_spectral(a, b, M)


def sampled_rho(S):
    """R_j / T_lj over all ordered pairs; for an equally-transmitting coupling
    every entry equals rho(k)."""
    P = np.abs(S) ** 2
    n = len(P)
    return np.array([P[j, j] / P[l, j] for j in range(n) for l in range(n) if l != j])


CATALOGS = {n: mps.search_real_mps(n) for n in (2, 3, 4, 5)}


def random_mps(rng):
    n = int(rng.integers(2, 6))
    return mps.random_mps_hermitian_unitary(n, rng, CATALOGS[n])


def test_01_s_at_one_equals_u():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 9))
        U = cp.VertexCoupling(random_unitary_from_factors(n, rng))
        worst = max(worst, nk.max_norm(sc.s_matrix_direct(U, 1.0).S - U.U))
    assert record_acceptance(1, "S(1) = U", worst <= 1e-12, f"max deviation {worst:.2e} <= 1e-12")


def test_02_formula_equivalence_and_03_unitarity():
    rng = np.random.default_rng(SEED + 1)
    worst_diff = worst_unit = worst_cons = 0.0
    for _ in range(50):
        U = random_two_eig(rng)
        form = cp.decompose(U)
        for k in GRID:
            direct = sc.s_matrix_direct(U, k)
            closed = sc.s_matrix_closed(form, k)
            worst_diff = max(worst_diff, nk.max_norm(direct.S - closed.S))
            for res in (direct, closed):
                worst_unit = max(worst_unit, res.unitarity_residual)
                worst_cons = max(worst_cons, res.conservation_residual())
    ok2 = record_acceptance(2, "direct vs closed S(k)", worst_diff <= 1e-9, f"max {worst_diff:.2e} <= 1e-9")
    ok3 = record_acceptance(
        3,
        "unitarity and conservation",
        worst_unit <= 1e-10 and worst_cons <= 1e-9,
        f"unitarity {worst_unit:.2e} <= 1e-10, row sums {worst_cons:.2e} <= 1e-9",
    )
    assert ok2 and ok3


def test_04_table_recovery():
    failures = []
    for n in (2, 3, 5, 8):
        for g in (-10, -3, -0.5, 0.5, 3, 10):
            for kind, tag, attr in (
                ("Delta", cl.CouplingType.TYPE_II, "gamma"),
                ("DeltaP", cl.CouplingType.TYPE_II, "gamma"),
                ("DeltaPrime", cl.CouplingType.TYPE_III, "gamma_prime"),
                ("DeltaPrimeS", cl.CouplingType.TYPE_III, "gamma_prime"),
            ):
                _, cls = cl.classify_coupling(cp.table1(kind, g, n))
                if cls.tag is not tag or abs(getattr(cls, attr) - g) > 1e-9:
                    failures.append((kind, g, n))
        if cl.classify_coupling(cp.table1("Free", 0, n))[1].tag is not cl.CouplingType.TYPE_I:
            failures.append(("Free", 0, n))
    assert record_acceptance(4, "standard couplings recovered", not failures, f"{len(failures)} mismatches")


def test_05_rho_closed_form():
    form, _ = cl.classify_coupling(cp.table1("Delta", 3.0, 3))
    rho1 = float(cl.rho_curve(form).evaluate(1.0))
    rng = np.random.default_rng(SEED + 5)
    worst = worst_rel = 0.0
    kinds = []
    for i in range(30):
        M, _ = random_mps(rng)
        kind = i % 4
        if kind == 0:
            a, b = 0.0, PI
        elif kind == 1:
            a, b = rng.uniform(-3, 3), PI
        elif kind == 2:
            a, b = 0.0, rng.uniform(-3, 3)
        else:
            a, b = rng.uniform(0.3, 2.8) * rng.choice([-1, 1]), rng.uniform(0.3, 2.8) * rng.choice([-1, 1])
            if abs(a - b) < 0.2:
                b = -b
        f, cls = cl.classify_coupling(cp.from_spectral(a, b, M))
        kinds.append(cls.tag)
        curve = cl.rho_curve(f)
        U = cp.VertexCoupling(f.to_matrix())
        for k in GRID:
            rho = curve.evaluate(k)
            # probabilities from S = mu I + nu M keep full relative precision
            # in the small transmission amplitudes, where rho reaches 1e5
            closed = sampled_rho(sc.s_matrix_closed(f, k).S)
            worst = max(worst, float(np.max(np.abs(closed - rho))))
            direct = sampled_rho(sc.s_matrix_direct(U, k).S)
            worst_rel = max(worst_rel, float(np.max(np.abs(direct - rho))) / rho)
    all_types = len(set(kinds)) == 4
    ok = abs(rho1 - 2.5) <= 1e-9 and worst <= 1e-8 and worst_rel <= 1e-10 and all_types
    detail = f"rho(1) = {rho1:.12f}, grid deviation {worst:.2e} <= 1e-8, direct path relative {worst_rel:.1e}"
    assert record_acceptance(5, "rho closed form", ok, detail + f", 4 types: {all_types}")


def _offdiag_max(S):
    return nk.max_norm(S - np.diag(np.diag(S)))


def test_06_full_reflection_limits():
    rng = np.random.default_rng(SEED + 6)
    worst = {"II": 0.0, "III": 0.0, "IV": 0.0}
    for _ in range(10):
        M, _ = random_mps(rng)
        s = rng.choice([-1, 1])
        cases = {
            "II": (cp.from_spectral(s * rng.uniform(0.3, 2.8), PI, M), [1e-6]),
            "III": (cp.from_spectral(0.0, s * rng.uniform(0.3, 2.8), M), [1e6]),
            "IV": (cp.from_spectral(rng.uniform(0.5, 2.5), -rng.uniform(0.5, 2.5), M), [1e-6, 1e6]),
        }
        for name, (U, ks) in cases.items():
            for k in ks:
                worst[name] = max(worst[name], _offdiag_max(sc.s_matrix_direct(U, k).S))
    ok = max(worst.values()) <= 1e-5
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record_acceptance(6, "full reflection limits", ok, detail + " <= 1e-5")


def test_07_transmission_ratio_constancy():
    rng = np.random.default_rng(SEED + 7)
    worst = 0.0
    for _ in range(10):
        M = mps.random_conjugate(mps.hadamard_m4(), rng)
        a, b = rng.uniform(-PI, PI, size=2)
        form = cp.decompose(cp.from_spectral(a, b, M))
        prof = sc.transmission_ratio_profile(form, GRID)
        worst = max(worst, float(np.nanmax(np.std(prof, axis=2))))
    assert record_acceptance(7, "transmission ratios constant", worst <= 1e-10, f"max std {worst:.2e} <= 1e-10")


def _sweep_c(tan_xi, d, n, points=400001):
    a = np.linspace(-PI, PI, points)[1:-1]
    a = a[np.abs(np.tan(a / 2)) > 1e-12]
    b = 2 * np.arctan(tan_xi / np.tan(a / 2))
    cc = np.cos(a / 2) * np.cos(b / 2)
    ss = np.sin(a / 2) * np.sin(b / 2)
    return (d * d + n - 1) * (cc**2 + ss**2) / np.sin((a - b) / 2) ** 2


def test_08_range_of_c():
    bound = cl.c_range(math.atan(-1.0), 0.5, 3).upper
    c_neg = _sweep_c(-1.0, 0.5, 3)
    c_pos = _sweep_c(1.0, 0.5, 3)
    ok = abs(bound - 1.125) <= 1e-12 and abs(c_neg.max() - bound) <= 1e-6 and c_neg.max() <= bound + 1e-12
    ok = ok and c_pos.max() > 1e4
    detail = f"max c {c_neg.max():.9f} vs bound {bound}, tan xi = 1 reaches {c_pos.max():.2e}"
    assert record_acceptance(8, "range of c", ok, detail)


def test_09_d_bound():
    ok = True
    parts = []
    for n in (3, 4, 5):
        cat = CATALOGS[n]
        ds = [c.profile.d for c in cat]
        keys = {mps.pattern_key(c) for c in cat}
        standard = all(mps.canonical_key(mps.standard_m(n, s)) in keys for s in (1, -1))
        good = max(ds) <= n / 2 - 1 + 1e-12 and any(abs(d - (n / 2 - 1)) <= 1e-12 for d in ds) and standard
        ok &= good
        parts.append(f"n={n}: max d {max(ds)}")
    assert record_acceptance(9, "d bound from exhaustive search", ok, ", ".join(parts))


def test_10_scale_invariance_and_decoupling():
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    diagonal_ok = True
    for _ in range(20):
        n = int(rng.integers(2, 9))
        U = cp.VertexCoupling(mps.random_hermitian_unitary(n, rng))
        S = [sc.s_matrix_direct(U, k).S for k in GRID]
        worst = max(worst, max(nk.max_norm(s - S[0]) for s in S))
        D = cp.VertexCoupling(np.diag(np.exp(1j * rng.uniform(-PI, PI, size=n))))
        diagonal_ok &= all(_offdiag_max(sc.s_matrix_direct(D, k).S) == 0.0 for k in GRID)
    ok = worst <= 1e-10 and diagonal_ok
    assert record_acceptance(
        10, "scale invariance and decoupling", ok, f"variation {worst:.2e} <= 1e-10, diagonal S: {diagonal_ok}"
    )


def test_11_design_round_trips():
    rng = np.random.default_rng(SEED + 11)
    worst = 0.0
    wrong = 0
    for i in range(100):
        M, profile = random_mps(rng)
        n = M.shape[0]
        c = float(10 ** rng.uniform(-1.5, 1.5))
        kind = ("II", "III", "IV")[i % 3]
        if kind == "II":
            U = cl.design_type_ii(M, None, c, int(rng.choice([-1, 1])))
            expect, xi = cl.CouplingType.TYPE_II, None
        elif kind == "III":
            U = cl.design_type_iii(M, None, c, int(rng.choice([-1, 1])))
            expect, xi = cl.CouplingType.TYPE_III, None
        else:
            xi = float(rng.uniform(-1.4, 1.4))
            c = min(c, 0.999 * cl.c_range(xi, profile.d, n).upper)
            U = cl.design_type_iv(M, None, xi, c)
            expect = cl.CouplingType.TYPE_IV
        _, cls = cl.classify_coupling(U)
        if cls.tag is not expect:
            wrong += 1
            continue
        worst = max(worst, abs(cls.c - c) / max(1.0, c))
        if xi is not None:
            worst = max(worst, abs(cls.xi - xi))
    try:
        cl.design_type_iv(mps.standard_m(3), None, -PI / 4, 1.2)
        rejected = False
    except COutOfRange as exc:
        rejected = abs(exc.interval.upper - 1.125) <= 1e-12 and exc.interval.lower == 0.0
    ok = wrong == 0 and worst <= 1e-9 and rejected
    detail = f"{wrong} misclassified, parameter error {worst:.2e} <= 1e-9, out-of-range rejected: {rejected}"
    assert record_acceptance(11, "design round trips", ok, detail)
