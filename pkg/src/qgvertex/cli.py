"""Command-line interface.

Exit codes: 0 success, 1 failed verification, 2 parse error, 3 non-unitary
input, 4 outside the two-eigenvalue family, 5 not equally-transmitting,
6 design parameter out of range, 7 search order too large.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import numkernel as nk
from .classify import (
    CouplingType,
    classify,
    design_type_ii,
    design_type_iii,
    design_type_iv,
    rho_curve,
)
from .coupling import (
    CouplingKind,
    VertexCoupling,
    decompose,
    from_spectral,
    is_decoupled,
    quadratic_closure_fit,
    table1,
)
from .estimator import probability_feature_names
from .exceptions import (
    COutOfRange,
    MoreThanTwoEigenvalues,
    NotHermitianUnitary,
    NotMPS,
    NotUnitary,
    NumericalInconsistency,
    OrderTooLarge,
)
from .mps import (
    MAX_SEARCH_ORDER,
    canonical_key,
    mps_profile,
    pattern_key,
    search_real_mps,
    standard_m,
    verify_bound,
)
from .scattering import cayley_s, k_grid, mu_nu, probabilities, s_matrix_closed, s_matrix_direct

EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_NOT_UNITARY = 3
EXIT_OUTSIDE = 4
EXIT_NOT_EQUAL = 5
EXIT_RANGE = 6
EXIT_ORDER = 7


class CliError(Exception):
    def __init__(self, code, message, report=None):
        super().__init__(message)
        self.code = code
        self.report = report


# ---------------------------------------------------------------- file formats


def _entry(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        return complex(float(re), float(im))
    raise ValueError(f"matrix entry {value!r} is not a number or [re, im] pair")


def parse_matrix(rows, n=None):
    if not isinstance(rows, list) or not rows:
        raise ValueError("matrix must be a non-empty list of rows")
    A = np.array([[_entry(v) for v in row] for row in rows], dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if n is not None and A.shape[0] != n:
        raise ValueError(f"declared n = {n} does not match matrix order {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _real(x):
    x = float(x)
    return 0.0 if x == 0 else x


def matrix_to_json(A):
    return [[[_real(z.real), _real(z.imag)] for z in row] for row in np.asarray(A)]


def _json_number(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def read_coupling_file(path, tol, strict=True):
    """Parse a coupling file.

    Returns a :class:`VertexCoupling`, or with ``strict=False`` a raw ``U``
    array when the file carries a matrix that fails the unitarity check.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise CliError(EXIT_PARSE, "coupling file must hold a JSON object")
    present = [key for key in ("U", "M", "kind") if key in data]
    if len(present) != 1:
        raise CliError(EXIT_PARSE, "coupling file needs exactly one of U, (alpha, beta, M), kind")
    try:
        n = int(data["n"]) if "n" in data else None
        if present[0] == "kind":
            kind = CouplingKind.parse(data["kind"])
            if n is None:
                raise ValueError("table1 coupling needs n")
            return table1(kind, float(data.get("param", 0.0)), n, tol)
        if present[0] == "M":
            M = parse_matrix(data["M"], n)
            alpha, beta = float(data["alpha"]), float(data["beta"])
        else:
            U = parse_matrix(data["U"], n)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"malformed coupling file: {exc}") from exc
    try:
        if present[0] == "M":
            return from_spectral(alpha, beta, M, tol)
        return VertexCoupling(U, tol=tol)
    except (NotUnitary, NotHermitianUnitary) as exc:
        if not strict and present[0] == "U":
            return U
        raise CliError(EXIT_NOT_UNITARY, str(exc)) from exc


def _decompose(coupling, tol):
    try:
        return decompose(coupling, tol)
    except MoreThanTwoEigenvalues as exc:
        report = {"class": CouplingType.OUTSIDE.value, "residual": exc.residual, "error": str(exc)}
        raise CliError(EXIT_OUTSIDE, str(exc), report) from exc
    except NumericalInconsistency as exc:
        report = {"class": CouplingType.OUTSIDE.value, "error": str(exc)}
        raise CliError(EXIT_OUTSIDE, str(exc), report) from exc


def _closure_residual(coupling, form, tol):
    U = coupling.U
    if form.degenerate:
        return float(np.linalg.norm(U - np.trace(U) / coupling.n * np.eye(coupling.n)))
    return quadratic_closure_fit(U, tol)[2]


def classification_report(coupling, tol):
    form = _decompose(coupling, tol)
    cls = classify(form, is_decoupled(coupling, tol), coupling.n, tol)
    profile = None
    if cls.tag is not CouplingType.DECOUPLED and coupling.n > 1:
        profile = mps_profile(form.M, tol)
    report = {"class": cls.tag.value, "alpha": form.alpha, "beta": form.beta}
    for name in ("gamma", "gamma_prime", "xi", "c"):
        value = getattr(cls, name)
        if value is not None:
            report[name] = value
    if profile is not None:
        report["d"] = profile.d
    report["equally_transmitting"] = profile is not None
    report["residual"] = _closure_residual(coupling, form, tol)
    return form, cls, profile, report


# ---------------------------------------------------------------- output helpers


def _fmt(x):
    return format(float(x), ".14e")


def _write_text(text, output):
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj, output=None):
    _write_text(json.dumps(obj, indent=2) + "\n", output)


def _write_csv(header, rows, output):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _write_text(buf.getvalue(), output)


def _grid(args):
    return k_grid(args.k_min, args.k_max, args.points, log_spacing=not args.linear)


def _rho_sampled(S):
    R, T = probabilities(S)
    if len(R) < 2:
        return math.nan
    return R[0] / T[0, 1] if T[0, 1] > 0 else math.inf


# ---------------------------------------------------------------- commands


def cmd_classify(args):
    coupling = read_coupling_file(args.input, args.tol)
    _, _, _, report = classification_report(coupling, args.tol)
    _dump_json(report, args.output)
    return 0


def cmd_scatter(args):
    coupling = read_coupling_file(args.input, args.tol)
    _decompose(coupling, args.tol)
    n = coupling.n
    pairs = [(j, l) for j in range(n) for l in range(n) if j != l]
    header = ["k", *probability_feature_names(n), "rho", "unitarity_residual"]
    rows = []
    for k in _grid(args):
        res = s_matrix_direct(coupling, k, args.tol)
        row = [k, *res.reflections, *(res.transmissions[j, l] for j, l in pairs)]
        row += [_rho_sampled(res.S), res.unitarity_residual]
        rows.append(row)
    _write_csv(header, rows, args.output)
    return 0


def cmd_rho(args):
    coupling = read_coupling_file(args.input, args.tol)
    form, cls, profile, _ = classification_report(coupling, args.tol)
    if cls.tag is CouplingType.DECOUPLED or profile is None or form.alpha == form.beta:
        raise CliError(EXIT_NOT_EQUAL, "coupling is not equally-transmitting")
    curve = rho_curve(form, profile, coupling.n, args.tol)
    rows = []
    for k in _grid(args):
        closed = float(curve.evaluate(k))
        sampled = _rho_sampled(s_matrix_direct(coupling, k, args.tol).S)
        rows.append([k, closed, sampled, abs(closed - sampled)])
    _write_csv(["k", "rho_closed", "rho_sampled", "abs_diff"], rows, args.output)
    return 0


def _design_matrix(args):
    if args.m == "standard":
        if args.n is None:
            raise CliError(EXIT_PARSE, "--n is required with the standard M")
        return standard_m(args.n, args.m_sign)
    try:
        with open(args.m, encoding="utf-8") as fh:
            data = json.load(fh)
        M = parse_matrix(data["M"] if isinstance(data, dict) else data, args.n)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_PARSE, f"cannot read M from {args.m}: {exc}") from exc
    if not nk.is_hermitian_unitary(M, args.tol):
        raise CliError(EXIT_NOT_UNITARY, "M must be Hermitian unitary")
    return M


def cmd_design(args):
    M = _design_matrix(args)
    n = M.shape[0]
    profile = mps_profile(M, args.tol)
    if profile is None:
        raise CliError(EXIT_NOT_EQUAL, "M is not a non-diagonal MPS matrix")
    xi = args.xi
    if args.tan_xi is not None:
        xi = math.atan(args.tan_xi)
    try:
        if args.type == "II":
            coupling = design_type_ii(M, profile, args.c, args.sign, n, args.tol)
        elif args.type == "III":
            coupling = design_type_iii(M, profile, args.c, args.sign, n, args.tol)
        else:
            if xi is None:
                raise CliError(EXIT_PARSE, "type IV design needs --xi or --tan-xi")
            coupling = design_type_iv(M, profile, xi, args.c, n, args.tol)
    except COutOfRange as exc:
        interval = exc.interval
        report = {
            "error": "COutOfRange",
            "c": exc.c,
            "interval": {"lower": interval.lower, "upper": _json_number(interval.upper), "text": str(interval)},
        }
        raise CliError(EXIT_RANGE, f"c outside admissible interval {interval}", report) from exc
    except NotMPS as exc:
        raise CliError(EXIT_NOT_EQUAL, str(exc)) from exc

    form, cls, _, report = classification_report(coupling, args.tol)
    _self_check(args.type, cls, args.c, xi)
    out = {
        "n": n,
        "U": matrix_to_json(coupling.U),
        "spectral": {"alpha": form.alpha, "beta": form.beta, "M": matrix_to_json(form.M)},
        "report": report,
    }
    _dump_json(out, args.output)
    return 0


def _self_check(kind, cls, c, xi):
    expected = {"II": CouplingType.TYPE_II, "III": CouplingType.TYPE_III, "IV": CouplingType.TYPE_IV}[kind]
    ok = cls.tag is expected and cls.c is not None and abs(cls.c - c) <= 1e-9 * max(1.0, c)
    if kind == "IV":
        ok = ok and abs(cls.xi - xi) <= 1e-9
    if not ok:
        raise CliError(EXIT_FAILED, f"designed coupling re-classifies as {cls}, not the request")


def cmd_search_mps(args):
    n = args.n
    if n > MAX_SEARCH_ORDER:
        raise CliError(EXIT_ORDER, f"exhaustive search supports n <= {MAX_SEARCH_ORDER}, got {n}")
    if n < 2:
        raise CliError(EXIT_PARSE, "search needs n >= 2")
    try:
        results = search_real_mps(n, args.tol, workers=args.workers)
    except OrderTooLarge as exc:
        raise CliError(EXIT_ORDER, str(exc)) from exc
    standard = {canonical_key(standard_m(n, s), args.tol) for s in (1, -1)}
    entries = []
    for cand in results:
        entries.append(
            {
                "d": cand.profile.d,
                "r": cand.profile.r,
                "t": cand.profile.t,
                "diag_signs": list(cand.pattern.diag_signs),
                "offdiag_signs": [list(row) for row in cand.pattern.offdiag_signs],
                "ratio_free": cand.pattern.ratio_free,
                "standard": pattern_key(cand) in standard,
            }
        )
    catalog = {"n": n, "count": len(entries)}
    if n > 2:
        catalog["d_bound"] = n / 2 - 1
        catalog["bound_verdict"] = verify_bound(n, results)
    else:
        catalog["d_bound"] = None
        catalog["bound_verdict"] = None
        catalog["note"] = "n = 2 is exempt from the bound d <= n/2 - 1"
    catalog["entries"] = entries
    _dump_json(catalog, args.output)
    return 0


def _check(name, residual, threshold):
    residual = float(residual)
    return {"name": name, "passed": bool(residual <= threshold), "residual": residual, "threshold": threshold}


def _skipped(name, reason):
    return {"name": name, "passed": None, "reason": reason}


def cmd_verify(args):
    obj = read_coupling_file(args.input, args.tol, strict=False)
    U = obj.U if isinstance(obj, VertexCoupling) else obj
    grid = _grid(args)
    checks = [_check("input_unitarity", nk.unitarity_residual(U), args.tol)]

    S_direct = [cayley_s(U, k, args.tol) for k in grid]
    checks.append(_check("s_at_1_equals_u", nk.max_norm(cayley_s(U, 1.0, args.tol) - U), 1e-12))
    checks.append(_check("grid_unitarity", max(nk.unitarity_residual(S) for S in S_direct), 1e-10))
    conservation = max(
        float(np.max(np.abs(R + T.sum(axis=1) - 1))) for R, T in map(probabilities, S_direct)
    )
    checks.append(_check("probability_conservation", conservation, 1e-9))

    report = {}
    form = None
    if isinstance(obj, VertexCoupling):
        try:
            form = decompose(obj, args.tol)
            checks.append(_check("two_eigenvalues", 0.0, args.tol * obj.n))
        except (MoreThanTwoEigenvalues, NumericalInconsistency) as exc:
            residual = getattr(exc, "residual", math.inf)
            checks.append(_check("two_eigenvalues", residual, args.tol * obj.n))
    else:
        checks.append(_skipped("two_eigenvalues", "input is not unitary"))

    names = ("formula_equivalence", "mu_nu_identity", "transmission_ratio_constancy")
    if form is None:
        checks.extend(_skipped(name, "no two-eigenvalue form") for name in names)
    else:
        closed = [s_matrix_closed(form, k).S for k in grid]
        diff = max(nk.max_norm(a - b) for a, b in zip(S_direct, closed))
        checks.append(_check("formula_equivalence", diff, 1e-9))
        if form.degenerate:
            checks.append(_skipped("mu_nu_identity", "single eigenvalue"))
        else:
            worst = 0.0
            for k in grid:
                mn = mu_nu(form, k)
                worst = max(
                    worst,
                    abs(abs(mn.mu) ** 2 + abs(mn.nu) ** 2 - 1),
                    abs((mn.mu * mn.nu.conjugate()).real),
                )
            checks.append(_check("mu_nu_identity", worst, 1e-9))
        checks.append(_ratio_check(form, closed, args.tol))

    if nk.is_hermitian(U, args.tol):
        variation = max(nk.max_norm(S - S_direct[0]) for S in S_direct)
        report["scale_invariant"] = bool(variation <= 1e-10)
        checks.append(_check("scale_invariance", variation, 1e-10))

    active = [c for c in checks if c["passed"] is not None]
    report["all_passed"] = all(c["passed"] for c in active)
    report["checks"] = checks
    _dump_json(report, args.output)
    return 0 if report["all_passed"] else EXIT_FAILED


def _ratio_check(form, closed, tol):
    n = form.n
    offdiag = [(j, l) for j in range(n) for l in range(n) if j != l]
    ref = next(((j, l) for j, l in offdiag if abs(form.M[j, l]) > tol), None)
    if ref is None:
        return _skipped("transmission_ratio_constancy", "M is diagonal")
    ratios = np.array([[abs(S[j, l]) / abs(S[ref]) for j, l in offdiag] for S in closed])
    return _check("transmission_ratio_constancy", float(np.max(np.std(ratios, axis=0))), 1e-10)


# ---------------------------------------------------------------- argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=nk.DEFAULT_TOL, help="absolute tolerance (default 1e-10)")
    common.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--k-min", type=float, default=1e-2)
    grid.add_argument("--k-max", type=float, default=1e2)
    grid.add_argument("--points", type=int, default=61)
    grid.add_argument("--linear", action="store_true", help="linear instead of logarithmic spacing")

    parser = argparse.ArgumentParser(prog="qgvertex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify a coupling")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scatter", parents=[common, grid], help="probability curves over a k grid")
    p.add_argument("input")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("rho", parents=[common, grid], help="closed-form and sampled rho(k)")
    p.add_argument("input")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("design", parents=[common], help="design an equally-transmitting coupling")
    p.add_argument("type", choices=["II", "III", "IV"])
    p.add_argument("--m", default="standard", help="'standard' or a JSON file holding M")
    p.add_argument("--m-sign", type=int, choices=[1, -1], default=1, help="sign of the standard M")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--sign", type=int, choices=[1, -1], default=1)
    xi = p.add_mutually_exclusive_group()
    xi.add_argument("--xi", type=float, default=None, help="mixing angle in radians")
    xi.add_argument("--tan-xi", type=float, default=None)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("search-mps", parents=[common], help="exhaustive real MPS search")
    p.add_argument("n", type=int)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_search_mps)

    p = sub.add_parser("verify", parents=[common, grid], help="run invariant checks")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    try:
        nk.check_tol(args.tol)
        if hasattr(args, "points"):
            k_grid(args.k_min, args.k_max, args.points)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except CliError as exc:
        if exc.report is not None:
            _dump_json(exc.report, getattr(args, "output", None))
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
