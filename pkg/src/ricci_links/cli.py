"""Command line entry point.

Each command writes its data files into the output directory and prints a
JSON envelope (command, config, checks, worst residual, files, wall time) to
stdout.  Exit codes: 0 certified, 1 a check failed, 2 bad usage or input,
3 numerical failure.
"""

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .errors import NumericalError, ParameterError
from .geometry import HALF_PI, BoundaryData, curvature_spectrum, validate_ideal_boundary
from .links import CERTIFICATION_TOL, build_link, link_volume, volume_normalization
from .shooting import blowup_extract, solve_expander
from .soliton import SolitonKind, check_identities, integrate_soliton

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
IDENTITY_TOL = 1e-6
STEADY_R_MAX = 8.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {text!r}") from exc


def _tag(x):
    return repr(float(x)).replace(".", "p").replace("-", "m")


class Outcome:
    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.checks = {}
        self.residual = None
        self.files = []
        self.extra = {}

    def path(self, name):
        return self.out_dir / name

    def csv(self, name, columns):
        self.files.append(io.write_csv(self.path(name), columns))

    def rows(self, name, header, rows):
        self.files.append(io.write_rows(self.path(name), header, rows))

    def json(self, name, obj):
        self.files.append(io.write_json(self.path(name), obj))

    @property
    def passed(self):
        return all(self.checks.values())


# ---------------------------------------------------------------------------
# commands

def cmd_link_build(args, cfg, out):
    link = build_link(args.p, args.q, args.t)
    metric = link.metric
    spectrum = curvature_spectrum(metric, cfg.grid_size)
    r = spectrum.r
    a, da, dda = metric.a(r)
    b, db, ddb = metric.b(r)
    stem = f"link_p{link.p}_q{link.q}_t{_tag(link.t)}"
    out.csv(f"{stem}_profile.csv", {"r": r, "a": a, "da": da, "dda": dda,
                                    "b": b, "db": db, "ddb": ddb})
    eig = spectrum.eigenvalues
    out.csv(f"{stem}_eigenvalues.csv", {"r": r, **{f"eig{k + 1}": eig[:, k] for k in range(5)}})
    summary = link.summary(cfg.grid_size)
    summary["volume"] = link_volume(link.p, link.q, link.t, cfg.quadrature_tol)
    summary["certified"] = summary["min_curvature"] >= 1.0 - CERTIFICATION_TOL
    out.json(f"{stem}_summary.json", summary)
    out.checks["min_curvature"] = summary["certified"]
    out.residual = max(0.0, 1.0 - summary["min_curvature"])


def cmd_link_family(args, cfg, out):
    if args.m < 1:
        raise ParameterError("m must be a positive integer")
    rows = []
    for t in args.t_grid:
        norm = volume_normalization(args.p, args.q, args.m, t, cfg.quadrature_tol)
        factor = min(1.0, norm.c_m)
        lo = build_link(args.p, args.q, t)
        base_min = lo.summary(cfg.grid_size)["min_curvature"]
        rows.append({"t": norm.t, "c_m": norm.c_m, "volume": norm.volume,
                     "min_curvature": base_min / factor,
                     "collapse_sup": math.sqrt(factor) * lo.fiber_sup(cfg.grid_size),
                     "target": norm.target_volume})
    header = ["t", "c_m", "volume", "min_curvature", "collapse_sup"]
    out.rows(f"link_family_p{args.p}_q{args.q}_m{args.m}.csv", header, rows)
    excess = [row["volume"] / row["target"] - 1.0 for row in rows]
    # Relative slack covers the quadrature error in the two volumes.
    out.checks["volume_cap"] = all(e <= 10 * cfg.quadrature_tol for e in excess)
    out.checks["min_curvature"] = all(row["min_curvature"] >= 1.0 - CERTIFICATION_TOL for row in rows)
    out.residual = max(max(excess), 0.0)


def _identity_checks(out, profile):
    report = check_identities(profile)
    out.checks["identities"] = report.worst() <= IDENTITY_TOL
    out.residual = report.worst()
    return report


def cmd_soliton(args, cfg, out):
    kind = SolitonKind.parse(args.kind)
    if kind is SolitonKind.STEADY:
        if args.kappa is None:
            raise ParameterError("steady solitons take --kappa")
        profile = integrate_soliton(args.n, kind, args.kappa, args.r_max or STEADY_R_MAX,
                                    rtol=cfg.ode_rel_tol, grid_size=cfg.grid_size)
        stem = f"soliton_steady_n{profile.n}_kappa{_tag(profile.kappa)}"
    else:
        if args.cone_angle is None:
            raise ParameterError("expanding solitons take --cone-angle")
        result = solve_expander(args.n, args.cone_angle, cfg.shooting_tol, cfg.ode_rel_tol,
                                grid_size=cfg.grid_size)
        profile = result.profile
        stem = f"soliton_expanding_n{profile.n}_c{_tag(result.c)}"
        out.json(f"{stem}_shooting.json", result.summary())
        out.checks["slope"] = result.slope_err <= cfg.shooting_tol
    out.csv(f"{stem}_profile.csv", profile.columns())
    report = _identity_checks(out, profile)
    out.json(f"{stem}_identities.json", report.as_dict())


def cmd_blowup(args, cfg, out):
    rows = blowup_extract(args.n, args.c_list, cfg.shooting_tol, cfg.ode_rel_tol)
    header = ["c", "kappa_star", "R_origin", "avr", "eps_coeff", "dist_to_bryant"]
    out.rows(f"blowup_n{int(args.n)}.csv", header, rows)
    dist = np.array([row["dist_to_bryant"] for row in rows])
    eps = np.array([row["eps_coeff"] for row in rows])
    out.checks["distance_decreasing"] = bool(np.all(np.diff(dist) < 0))
    out.checks["eps_coeff_decreasing"] = bool(np.all(np.diff(eps) < 0))
    out.residual = float(dist[-1])


def cmd_boundary_check(args, cfg, out):
    r, a, b = io.read_boundary_csv(args.input)
    report = validate_ideal_boundary(BoundaryData(float(r[-1]), r, a, b))
    out.json(f"{Path(args.input).stem}_boundary.json",
             {"checks": report.checks, "worst": report.worst, "failed": report.failed})
    out.checks.update(report.checks)
    out.residual = max(0.0, report.worst["L"] - HALF_PI)


# ---------------------------------------------------------------------------
# parser

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields")
    common.add_argument("--quadrature-tol", type=float)
    common.add_argument("--ode-rel-tol", type=float)
    common.add_argument("--shooting-tol", type=float)
    common.add_argument("--grid-size", type=int)
    common.add_argument("--output-dir", "--out", dest="output_dir")

    parser = _Parser(prog="ricci-links", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    link = top.add_parser("link", help="positively curved links").add_subparsers(
        dest="action", required=True)
    b = link.add_parser("build", parents=[common])
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--q", type=int, required=True)
    b.add_argument("--t", type=float, required=True)
    b.set_defaults(func=cmd_link_build)
    f = link.add_parser("family", parents=[common])
    f.add_argument("--p", type=int, required=True)
    f.add_argument("--q", type=int, required=True)
    f.add_argument("--m", type=int, required=True)
    f.add_argument("--t-grid", type=_floats, required=True)
    f.set_defaults(func=cmd_link_family)

    sol = top.add_parser("soliton", help="rotationally symmetric solitons").add_subparsers(
        dest="kind", required=True)
    s = sol.add_parser("steady", parents=[common])
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--r-max", type=float)
    s.set_defaults(func=cmd_soliton, cone_angle=None)
    e = sol.add_parser("expanding", parents=[common])
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--cone-angle", type=float, required=True)
    e.set_defaults(func=cmd_soliton, kappa=None, r_max=None)

    bl = top.add_parser("blowup", parents=[common])
    bl.add_argument("--n", type=int, required=True)
    bl.add_argument("--c-list", type=_floats, required=True)
    bl.set_defaults(func=cmd_blowup)

    bd = top.add_parser("boundary", help="ideal boundary data").add_subparsers(
        dest="action", required=True)
    c = bd.add_parser("check", parents=[common])
    c.add_argument("input", help="CSV with header r,a,b")
    c.set_defaults(func=cmd_boundary_check)
    return parser


def main(argv=None, stdout=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    envelope = {"command": argv}
    out = None
    try:
        args = build_parser().parse_args(argv)
        cfg = io.RunConfig.load(args.config, quadrature_tol=args.quadrature_tol,
                                ode_rel_tol=args.ode_rel_tol, shooting_tol=args.shooting_tol,
                                grid_size=args.grid_size, output_dir=args.output_dir)
        envelope["config"] = cfg.as_dict()
        out = Outcome(cfg.output_dir)
        args.func(args, cfg, out)
        code = EXIT_OK if out.passed else EXIT_FAILED
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except ParameterError as exc:
        code = EXIT_USAGE
        envelope["error"] = {"type": type(exc).__name__, "message": str(exc)}
    except NumericalError as exc:
        code = EXIT_NUMERICAL
        envelope["error"] = {"type": type(exc).__name__, "message": str(exc),
                             **{k: v for k, v in vars(exc).items() if v is not None}}
        if out is not None:
            out.json("diagnostic.json", {"command": argv, "error": envelope["error"]})
    if out is not None:
        envelope.update(checks=out.checks, worst_residual=out.residual, files=out.files)
    envelope["exit_code"] = code
    envelope["wall_time"] = time.perf_counter() - start
    stdout.write(io.dumps(envelope))
    return code


def run():
    sys.exit(main())
