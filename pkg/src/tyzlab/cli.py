"""``tyzlab`` command line.

Exit codes: 0 success, 1 computational failure (including values that
diverge from the reference derivation), 2 contradiction certified as
expected, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, report as rep

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONTRADICTION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        sys.stderr.write(f"\n{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _existing_file(text: str) -> Path:
    p = Path(text)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return p


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return v


def _level_range(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("levels are given as A..B or a single integer") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("need 1 <= A <= B")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tyzlab", description="Balanced metrics, TYZ coefficients and toric KE checks.")
    p.add_argument("--version", action="version", version=f"tyzlab {__version__}")
    p.add_argument("--print-schema", action="store_true", help="print the report JSON schema and exit")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    poly = sub.add_parser("polytope", help="lattice polytopes and the built-in cases")
    psub = poly.add_subparsers(dest="action", parser_class=_Parser)
    pp = psub.add_parser("points", help="enumerate lattice points of a polytope file")
    pp.add_argument("--file", type=_existing_file, required=True)
    pp.add_argument("--report")
    pb = psub.add_parser("builtin", help="show a built-in case")
    pb.add_argument("--case", required=True)
    pb.add_argument("--report")

    cv = sub.add_parser("curvature", help="exact curvature of (i/2) dd^c log F")
    cv.add_argument("--potential", type=_existing_file, required=True)
    cv.add_argument("--at", type=_existing_file)
    cv.add_argument("--report")

    ke = sub.add_parser("ke-check", help="certify a toric KE non-existence case")
    ke.add_argument("--case", required=True)
    ke.add_argument("--max-degree", type=int)
    ke.add_argument("--non-strict", action="store_true",
                    help="exit 2 on a certified contradiction even if intermediate values differ")
    ke.add_argument("--report")

    lb = sub.add_parser("lbs", help="LeBrun-Simanca axis asymptotics")
    lb.add_argument("--dim", type=int, required=True)
    lb.add_argument("--model", choices=("potential", "displayed", "displayed-transpose"))
    lb.add_argument("--report")

    ds = sub.add_parser("distortion", help="Kempf distortion function, balancing and TYZ fit")
    ds.add_argument("--potential", type=_existing_file, required=True)
    ds.add_argument("--polytope", type=_existing_file)
    ds.add_argument("--m", type=_level_range, default=[1])
    ds.add_argument("--balance", action="store_true")
    ds.add_argument("--max-iters", type=int, default=50)
    ds.add_argument("--tol-quad", type=_positive, default=1e-10)
    ds.add_argument("--tol-constancy", type=_positive, default=1e-6)
    ds.add_argument("--tol-fit", type=_positive, default=1e-6)
    ds.add_argument("--report")
    return p


def _load_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def _emit(report: dict, path: str | None) -> None:
    text = rep.write(report, path)
    if path is None or path == "-":
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_polytope(args) -> int:
    from .lattice import (LatticePolytope, builtin, lattice_points, satisfies_assumption1, CASES)

    if args.action == "points":
        poly = LatticePolytope.from_json(_load_json(args.file))
        pts = lattice_points(poly)
        a1 = satisfies_assumption1(poly)
        results = {"polytope": poly.to_json(), "vertices": [list(v) for v in poly.vertices],
                   "redundant": list(poly.redundant), "count": len(pts), "points": [list(p) for p in pts],
                   "assumption1": {"holds": a1.holds, "reason": a1.reason}}
        _emit(rep.make_report("polytope", {"action": "points", "file": str(args.file)}, "ok", results),
              args.report)
        return EXIT_OK
    if args.action == "builtin":
        if args.case not in CASES:
            raise UsageError(f"unknown case {args.case!r}; choose from {', '.join(CASES)}")
        b = builtin(args.case)
        pts = lattice_points(b.polytope)
        results = {"case": b.case, "fan": b.fan.to_json(), "normalization": b.normalization.to_json(),
                   "polytope": b.polytope.to_json(), "count": len(pts), "points": [list(p) for p in pts]}
        _emit(rep.make_report("polytope", {"action": "builtin", "case": args.case}, "ok", results), args.report)
        return EXIT_OK
    raise UsageError("polytope needs an action: points or builtin")


def _cmd_curvature(args) -> int:
    from .curvature import curvature, einstein_constant, evaluate_report, kahler_symmetric
    from .exactpoly import Polynomial

    F = Polynomial.from_json(_load_json(args.potential))
    r = curvature(F)
    md = r.metric
    results = {
        "n": r.n,
        "frame": "Riemann and Ricci components in logarithmic coordinates; scalars are frame free",
        "metric": [[e.to_rational() for e in row] for row in md.g],
        "det_g": md.det_g.to_rational(),
        "detA": md.detA,
        "riemann": {",".join(map(str, k)): v.to_rational() for k, v in sorted(r.R.items())},
        "ricci": [[v.to_rational() if v else "0" for v in row] for row in r.Ric],
        "scalars": {k: (v.to_rational() if hasattr(v, "to_rational") else v) for k, v in r.scalars().items()},
        "kahler_symmetric": kahler_symmetric(r.R),
        "einstein_constant": einstein_constant(r),
    }
    inputs = {"potential": F.to_json()}
    if args.at:
        point = [Fraction(str(c)) for c in _load_json(args.at)]
        inputs["at"] = point
        ev = evaluate_report(r, point)
        results["at_point"] = ev
    _emit(rep.make_report("curvature", inputs, "ok", results), args.report)
    return EXIT_OK


def _cmd_ke_check(args) -> int:
    from .kecheck import CertificationDiverged, CertificationFailed, certify_case, taylor_equations
    from .lattice import CASES, builtin

    if args.case not in CASES:
        raise UsageError(f"unknown case {args.case!r}; choose from {', '.join(CASES)}")
    inputs = {"case": args.case, "max_degree": args.max_degree, "strict": not args.non_strict}
    extra = {}
    if args.max_degree is not None:
        if args.max_degree < 0:
            raise UsageError("--max-degree must be nonnegative")
        system = taylor_equations(builtin(args.case).polytope, max_total_degree=args.max_degree)
        extra["taylor_system"] = system.to_json()
    try:
        cert = certify_case(args.case, strict=not args.non_strict)
        status, code = "contradiction-certified", EXIT_CONTRADICTION
        err = None
    except CertificationDiverged as exc:
        cert = exc.certificate
        status, code, err = "diverged", EXIT_FAILURE, str(exc)
    except CertificationFailed as exc:
        _emit(rep.make_report("ke-check", inputs, "failed", extra, error=str(exc)), args.report)
        return EXIT_FAILURE
    results = {"certificate": cert.to_json(), **extra}
    _emit(rep.make_report("ke-check", inputs, status, results, error=err), args.report)
    return code


def _cmd_lbs(args) -> int:
    from .lbs import MODELS, axis_defect, default_model, second_derivative_table

    n = args.dim
    if not 2 <= n <= 8:
        raise UsageError("--dim must satisfy 2 <= n <= 8")
    primary = args.model or default_model(n)
    main = axis_defect(n, primary)
    others = [axis_defect(n, m, path="exact") for m in MODELS if m != primary]
    table = second_derivative_table(n)
    results = {
        "primary": main.to_json(),
        "alternatives": [a.to_json() for a in others],
        "second_derivatives": {"model": table["model"], "exponent_in_t": table["exponent_in_t"],
                               "entries": [e.to_json() for e in table["entries"]],
                               "earlier_order": [list(k) for k in table["earlier_order"]]},
    }
    _emit(rep.make_report("lbs", {"dim": n, "model": primary}, "ok", results), args.report)
    return EXIT_OK


def _cmd_distortion(args) -> int:
    import numpy as np

    from .distortion import (PolarizedToricMetric, balancing_iterate, interval_polytope, kempf_T,
                             monomial_norms, tyz_fit)
    from .exactpoly import Polynomial
    from .lattice import LatticePolytope

    F = Polynomial.from_json(_load_json(args.potential))
    if args.polytope:
        poly = LatticePolytope.from_json(_load_json(args.polytope))
    elif F.nvars == 1:
        poly = interval_polytope(F.total_degree())
    else:
        raise UsageError("--polytope is required when F has more than one variable")
    base = PolarizedToricMetric(F, poly, args.m[0])
    tables = []
    for m in args.m:
        metric = base.at_level(m)
        tab = kempf_T(metric, gram=monomial_norms(metric, rtol=args.tol_quad))
        tables.append({"m": m, "constant": tab.ratio - 1 < args.tol_constancy, **tab.to_json()})
    results = {"levels": tables}
    gamma = None
    if len(args.m) >= 5 and args.m[-1] - args.m[0] >= 4:
        point = np.ones(F.nvars)
        fit = tyz_fit(base, args.m, point)
        results["tyz_fit"] = {"point": point.tolist(), **fit.to_json(),
                              "within_tolerance": fit.residual < args.tol_fit}
        gamma = fit.coefficients[0]
    if args.balance:
        results["balancing"] = balancing_iterate(base, args.max_iters, args.tol_constancy).to_json()
    tolerances = {"quadrature": args.tol_quad, "constancy": args.tol_constancy, "fit": args.tol_fit}
    inputs = {"potential": F.to_json(), "polytope": poly.to_json(), "levels": args.m, "balance": args.balance}
    _emit(rep.make_report("distortion", inputs, "ok", results, tolerances, gamma), args.report)
    return EXIT_OK


COMMANDS = {
    "polytope": _cmd_polytope,
    "curvature": _cmd_curvature,
    "ke-check": _cmd_ke_check,
    "lbs": _cmd_lbs,
    "distortion": _cmd_distortion,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.print_schema:
        sys.stdout.write(json.dumps(rep.REPORT_SCHEMA, indent=2) + "\n")
        return EXIT_OK
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_help(sys.stderr)
        sys.stderr.write(f"\ntyzlab: error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        message = f"{type(exc).__name__}: {exc}"
        sys.stderr.write(f"tyzlab: {message}\n")
        if getattr(args, "report", None):
            failed = rep.make_report(args.command, {}, "failed", {}, error=message)
            rep.write(failed, args.report)
        return EXIT_FAILURE


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
