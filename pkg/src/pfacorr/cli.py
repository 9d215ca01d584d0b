"""Command-line interface.

Every subcommand prints a human-readable result. With ``--out DIR`` it also
writes CSV/JSON artifacts, PNG figures and a ``manifest.json`` with SHA-256
digests of fixtures and outputs. Exit codes: 0 success, 2 usage, 3 domain or
geometry error, 4 numerical failure.
"""
import argparse
import json
import logging
import math
import pathlib
import sys
import warnings
from importlib import resources

import numpy as np

from . import __version__
from .constants import BoundaryCondition, coefficient_set, theta1_exact
from .errors import DomainError, PfaCorrError
from .fileio import RunManifest, fmt, format_table, read_curve_csv, write_csv, write_curve_csv
from .functional import (IntegrationDomain, closed_form_inclined_cylinders,
                         closed_form_two_spheres, gradient_energy, hyperboloid_correction,
                         pfa_energy_paraboloid)
from .matching import load_kernel_csv, matching_check
from .oracle import OracleConfig, ae_extract, oracle_curve, oracle_energy_D, pfa_energy_sphere_plate
from .pade import (AsymptoticSeries, EnergyCurve, build_energy_pade, build_pade,
                   classify_poles, energy_curve, eval_energy_pade, eval_force, extract_thetas,
                   fit_theta1, load_series)
from .profiles import Flat, Hyperboloid, ParallelCylinder, Sphere, load_profile, profile_from_dict

logger = logging.getLogger("pfacorr")

#: series lengths used for the published approximants
DEFAULT_TERMS = {"D": 7, "N": 13, "EM": 15}
#: oracle points of figure1 and of the table1 fit
FIGURE_ORACLE_POINTS = (0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 1.0)
TABLE_FIT_GRID = tuple(np.linspace(0.1, 0.5, 9))


class Output:
    """Collects a command's text, tables and files; writes a manifest with ``--out``."""

    def __init__(self, args, command):
        self.dir = pathlib.Path(args.out) if getattr(args, "out", None) else None
        self.plots = not getattr(args, "no_plot", False)
        params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
        self.manifest = RunManifest(command=command, parameters=params)
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def text(self, content, name=None):
        print(content)
        if self.dir is not None and name:
            path = self.dir / name
            path.write_text(content + "\n")
            self.manifest.add_output(path)

    def csv(self, name, header, rows, comments=()):
        rows = list(rows)
        if self.dir is None:
            print(",".join(header))
            for row in rows:
                print(",".join(fmt(v) for v in row))
            return None
        path = write_csv(self.dir / name, header, rows, comments)
        self.manifest.add_output(path)
        print(f"wrote {path}")
        return path

    def curve(self, name, curve):
        if self.dir is None:
            return self.csv(name, ["d_over_R", "E_over_EPFA"] + (["error"] if curve.error is not None else []),
                            zip(curve.d_over_R, curve.ratio,
                                *([curve.error] if curve.error is not None else [])))
        path = write_curve_csv(self.dir / name, curve)
        self.manifest.add_output(path)
        print(f"wrote {path}")
        return path

    def json(self, name, obj):
        content = json.dumps(obj, indent=1, sort_keys=True)
        if self.dir is None:
            print(content)
            return
        path = self.dir / name
        path.write_text(content + "\n")
        self.manifest.add_output(path)
        print(f"wrote {path}")

    def plot(self, name, series, **kwargs):
        if self.dir is None or not self.plots:
            return
        from .plotting import plot_curves

        path = plot_curves(self.dir / name, series, **kwargs)
        self.manifest.add_output(path)
        print(f"wrote {path}")

    def fixture(self, name, path):
        self.manifest.add_fixture(name, path)

    def finish(self):
        if self.dir is not None:
            path = self.manifest.write(self.dir)
            print(f"wrote {path}")


# -- helpers --------------------------------------------------------------------

def _bc_name(value):
    return BoundaryCondition.parse(value).value


def _series_for(bc, terms, external, out):
    """Series from an external file, else the packaged fixture truncated to ``terms``."""
    if bc in external:
        path = external[bc]
        out.fixture(f"series_{bc}", path)
        series = AsymptoticSeries.from_json(path)
    else:
        series = load_series(bc)
        with resources.as_file(resources.files("pfacorr").joinpath("data", f"ae_{bc}.json")) as p:
            out.fixture(f"ae_{bc}.json", p)
    n = terms if terms is not None else DEFAULT_TERMS.get(bc, series.n)
    if n > series.n:
        raise DomainError(f"the {bc} series has {series.n} terms, {n} requested")
    return series.truncated(n)


def _parse_assignments(items, what):
    out = {}
    for item in items or ():
        if "=" not in item:
            raise DomainError(f"{what} must look like BC=PATH, got {item!r}")
        key, path = item.split("=", 1)
        out[_bc_name(key)] = path
    return out


def _sweep(lo, hi, n, log=True):
    if not (0 < lo < hi) or n < 2:
        raise DomainError("sweep needs 0 < lo < hi and at least two points")
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _coeff_alpha_beta(bc):
    cs = coefficient_set(bc)
    return float(cs.alpha), cs.beta1


# -- coeffs ---------------------------------------------------------------------

def cmd_coeffs(args):
    out = Output(args, "coeffs")
    cs = coefficient_set(args.bc) if args.bc2 is None else coefficient_set(args.bc, args.bc2)
    th = 2 * cs.beta1_exact - 1
    entries = [
        ("alpha", str(cs.alpha), float(cs.alpha)),
        ("beta1", str(cs.beta1_exact), cs.beta1),
        ("beta2", str(cs.beta2_exact), cs.beta2),
        ("beta_cross", str(cs.beta_cross_exact), cs.beta_cross),
        ("beta_minus", "0", 0.0),
        ("theta1", str(th), float(th)),
    ]
    if args.json:
        out.json("coeffs.json", {
            "pair": list(cs.pair),
            **{name: {"exact": exact, "value": value} for name, exact, value in entries},
        })
    else:
        table = format_table(["quantity", "exact", "value"],
                             [(n, e, v) for n, e, v in entries])
        out.text(f"pair {cs.pair[0]}/{cs.pair[1]}\n{table}", "coeffs.txt")
    out.finish()
    return 0


# -- geometry -------------------------------------------------------------------

def _quadrature_ratio(H1, H2, bc, e_pfa, domain):
    res = gradient_energy(H1, H2, bc, domain=domain)
    return res.energy / e_pfa, res.error / abs(e_pfa), res.truncated


def cmd_geometry(args):
    out = Output(args, "geometry")
    bc = _bc_name(args.bc)
    x = _sweep(args.sweep[0], args.sweep[1], int(args.sweep[2]))
    quad = args.method in ("quadrature", "both")
    closed = args.method in ("closed", "both")
    domain = IntegrationDomain(rtol=args.rtol)
    R = args.R
    alpha = float(coefficient_set(bc).alpha)
    series = []
    if args.shape in ("sphere-plate", "two-spheres"):
        R2 = math.inf if args.shape == "sphere-plate" else (args.R2 or R)
        rows = []
        for xi in x:
            d = xi * R
            cf = closed_form_two_spheres(R, R2, d, bc)
            q = qe = tr = None
            if quad:
                lower = Flat(0.0) if math.isinf(R2) else Sphere(R2, 0.0, -1)
                q, qe, tr = _quadrature_ratio(lower, Sphere(R, d), bc, cf["E_PFA"], domain)
            rows.append((xi, cf["ratio"] if closed else None, q, qe, tr))
        header = ["d_over_R", "closed_form", "quadrature", "quadrature_error", "truncated"]
    elif args.shape == "hyperboloid-plate":
        lam = args.lam
        Rc = R
        coef = hyperboloid_correction(lam, bc)
        rows = []
        for xi in x:
            d = xi * Rc
            q = qe = tr = None
            if quad:
                e_pfa = pfa_energy_paraboloid(d, Rc, Rc, alpha)
                q, qe, tr = _quadrature_ratio(Flat(0.0), Hyperboloid(Rc * lam ** 2, lam, d), bc,
                                              e_pfa, domain)
            rows.append((xi, 1.0 + coef * xi if closed else None, q, qe, tr))
        header = ["d_over_Rc", "first_order", "quadrature", "quadrature_error", "truncated"]
    elif args.shape == "crossed-cylinders":
        R2 = args.R2 or R
        rows = []
        for th_deg in args.theta:
            th = math.radians(th_deg)
            for xi in x:
                d = xi * R
                cf = closed_form_inclined_cylinders(R, R2, d, th, bc)
                q = qe = tr = None
                if quad:
                    q, qe, tr = _quadrature_ratio(ParallelCylinder(R, 0.0, 0.0, -1),
                                                  ParallelCylinder(R2, th, d, 1), bc,
                                                  cf["leading"], domain)
                rows.append((xi, th_deg, cf["leading"], cf["correction"] if closed else None,
                             q, qe, tr))
        header = ["d_over_R1", "theta_deg", "leading", "correction_closed_form",
                  "correction_quadrature", "quadrature_error", "truncated"]
    else:  # profiles
        if not (args.lower and args.upper):
            raise DomainError("--shape profiles needs --lower and --upper JSON descriptors")
        lower = load_profile(args.lower)
        with open(args.upper) as fh:
            upper_desc = json.load(fh)
        out.fixture("lower", args.lower)
        out.fixture("upper", args.upper)
        rows = []
        for d in x:
            desc = dict(upper_desc)
            desc["offset" if desc.get("kind") == "flat" else "apex"] = float(d)
            res = gradient_energy(lower, profile_from_dict(desc), bc, domain=domain)
            rows.append((d, res.energy, res.pfa_energy, res.ratio, res.error, res.truncated))
        header = ["d", "E", "E_PFA_quadrature", "E_over_EPFA", "error", "truncated"]
    name = f"geometry_{args.shape}_{bc}"
    out.csv(f"{name}.csv", header, rows, comments=[f"bc={bc} R={R}"])
    if args.shape != "profiles":
        xs = np.array([r[0] for r in rows])
        plot = []
        for col, label, style in ((1 if args.shape != "crossed-cylinders" else 3, "closed form", "dashed"),
                                  (2 if args.shape != "crossed-cylinders" else 4, "quadrature", "points")):
            ys = [r[col] for r in rows]
            if all(v is not None for v in ys):
                plot.append({"x": xs, "y": np.array(ys, float), "label": label, "style": style})
        out.plot(f"{name}.png", plot, xlabel=header[0],
                 ylabel="E/E_PFA" if args.shape != "crossed-cylinders" else "correction",
                 title=f"{args.shape}, {bc}")
    out.finish()
    return 0


# -- kernel-match ---------------------------------------------------------------

def cmd_kernel_match(args):
    out = Output(args, "kernel-match")
    kernel = load_kernel_csv(args.kernel)
    out.fixture("kernel", args.kernel)
    bc = _bc_name(args.bc)
    law = coefficient_set(bc).law
    expected = coefficient_set(bc).beta1 if args.check_beta else None
    ds = args.d if args.d else sorted(kernel.table)
    rows = []
    for d in ds:
        rep = matching_check(kernel, law, d, rtol=args.rtol, beta_expected=expected)
        rows.append((d, rep.fit.gamma, rep.fit.delta, rep.beta, rep.beta_err,
                     rep.residuals.get("U' = mu"), rep.residuals["U'' = 2 gamma"]))
    header = ["d", "gamma", "delta", "beta", "beta_err", "residual_mu", "residual_gamma"]
    out.text(format_table(header, rows), "kernel_match.txt")
    out.csv("kernel_match.csv", header, rows)
    out.finish()
    return 0


# -- pade -------------------------------------------------------------------------

def cmd_pade(args):
    out = Output(args, f"pade {args.action}")
    bc = _bc_name(args.bc)
    external = _parse_assignments([f"{bc}={args.series}"] if args.series else [], "--series")
    series = _series_for(bc, args.terms, external, out)
    alpha, beta = _coeff_alpha_beta(bc)
    energy = args.variant == "energy"
    pade = build_energy_pade(series, alpha, beta) if energy else build_pade(series, alpha, beta)
    if args.action == "build":
        info = {"bc": bc, "variant": args.variant, "n": series.n, "j0": series.j0,
                "M": pade.M, "p": pade.p.tolist(), "q": pade.q.tolist(),
                "condition": pade.condition, "residual": pade.residual}
        if not energy:
            info.update({k: v for k, v in extract_thetas(pade, alpha).items()})
        out.json(f"pade_{bc}_{args.variant}.json", info)
    elif args.action == "eval":
        if not args.r:
            raise DomainError("pade eval needs --r values")
        r = np.asarray(args.r, float)
        vals = eval_energy_pade(pade, r) if energy else eval_force(pade, r)
        out.csv(f"pade_{bc}_eval.csv", ["r", "E_R" if energy else "f"], zip(r, np.atleast_1d(vals)))
    elif args.action == "thetas":
        if energy:
            raise DomainError("thetas are defined for the force approximant only")
        th = extract_thetas(pade, alpha)
        rows = [("theta1", th["theta1"]), ("theta1 exact", float(theta1_exact(bc))),
                ("theta2", th["theta2"])]
        out.text(format_table(["quantity", "value"], rows), f"thetas_{bc}.txt")
    elif args.action == "poles":
        info = classify_poles(pade, args.r_max)
        if not info:
            out.text(f"no poles on (0, {args.r_max:g}]", f"poles_{bc}.txt")
        else:
            rows = [(p["root"], 1.0 / p["root"], p["residue"], p["relative_residue"],
                     p["zero_distance"], "doublet" if p["doublet"] else "pole") for p in info]
            out.text(format_table(["r", "d_over_R", "residue", "relative_residue",
                                   "zero_distance", "kind"], rows), f"poles_{bc}.txt")
    else:  # curve
        x = _sweep(args.grid[0], args.grid[1], int(args.grid[2]), log=False)
        if energy:
            r = 1.0 / x
            ratio = eval_energy_pade(pade, r) / (-alpha * math.pi ** 3 * r * r / 1440.0)
            curve = EnergyCurve(x, ratio, provenance="pade-energy")
        else:
            curve = energy_curve(pade, alpha, 1.0 / x)
        out.curve(f"pade_{bc}_{args.variant}_curve.csv", curve)
        out.plot(f"pade_{bc}_{args.variant}_curve.png",
                 [{"x": curve.d_over_R, "y": curve.ratio, "label": f"{bc} Pade", "group": bc}])
    out.finish()
    return 0


# -- oracle -----------------------------------------------------------------------

def _oracle_template(args):
    return OracleConfig(R=args.R, d=args.R, ell_max=args.ell_max, n_kappa=args.n_kappa)


def cmd_oracle(args):
    out = Output(args, f"oracle {args.action}")
    template = _oracle_template(args)
    if args.action == "energy":
        rows = []
        for x in args.d_over_R:
            from dataclasses import replace

            cfg = replace(template, d=x * args.R)
            E = oracle_energy_D(cfg)
            e_pfa = pfa_energy_sphere_plate(args.R, cfg.d)
            rows.append((x, cfg.ell, E, e_pfa, E / e_pfa))
        header = ["d_over_R", "ell_max", "E", "E_PFA", "E_over_EPFA"]
        out.text(format_table(header, rows), "oracle_energy.txt")
        out.csv("oracle_energy.csv", header, rows)
    else:
        lo, hi, n = args.grid if args.grid else ((0.1, 1.0, 7) if args.action == "curve" else (10.0, 40.0, 8))
        x = np.linspace(lo, hi, int(n))
        curve = oracle_curve(template, x)
        if args.action == "curve":
            out.curve("oracle_curve.csv", curve)
            out.plot("oracle_curve.png", [{"x": curve.d_over_R, "y": curve.ratio, "yerr": curve.error,
                                           "label": "D oracle", "style": "points", "group": "D"}])
        else:
            est = ae_extract(curve, j0=2, m=args.terms, R=args.R)
            exact = load_series("D").coefficients
            rows = [(j + 1, c, u, exact[j]) for j, (c, u) in
                    enumerate(zip(est.coefficients, est.uncertainties))]
            rows += [(len(rows) + k + 1, None, None, exact[len(rows) + k]) for k in range(est.withheld)]
            out.text(format_table(["j", "f_j estimate", "uncertainty", "f_j series"], rows),
                     "oracle_ae.txt")
    out.finish()
    return 0


# -- fit-theta --------------------------------------------------------------------

def cmd_fit_theta(args):
    out = Output(args, "fit-theta")
    if args.curve:
        curve = read_curve_csv(args.curve)
        out.fixture("curve", args.curve)
    else:
        curve = oracle_curve(OracleConfig(R=1.0, d=1.0, ell_max=args.ell_max), TABLE_FIT_GRID)
    fit = fit_theta1(curve, tuple(args.range))
    rows = [("theta1", fit.theta1, fit.theta1_stderr), ("theta2", fit.theta2, fit.theta2_stderr),
            ("rms residual", fit.residual, None), ("points", fit.n_points, None)]
    out.text(format_table(["quantity", "value", "stderr"], rows), "fit_theta.txt")
    out.finish()
    return 0


# -- figure1 / table1 -------------------------------------------------------------

def cmd_figure1(args):
    out = Output(args, "figure1")
    external = _parse_assignments(args.series, "--series")
    x = np.linspace(args.x_min, args.x_max, args.points)
    plot = []
    for bc_raw in args.bc:
        bc = _bc_name(bc_raw)
        series = _series_for(bc, None if bc in external else args.terms.get(bc), external, out)
        alpha, beta = _coeff_alpha_beta(bc)
        pade = build_pade(series, alpha, beta)
        curve = energy_curve(pade, alpha, 1.0 / x)
        th1 = float(theta1_exact(bc))
        first = 1.0 + th1 * curve.d_over_R
        out.csv(f"figure1_{bc}.csv", ["d_over_R", "pade", "first_correction"],
                zip(curve.d_over_R, curve.ratio, first),
                comments=[f"bc={bc} n={series.n} M={pade.M}"])
        plot.append({"x": curve.d_over_R, "y": curve.ratio, "label": f"{bc} Pade", "group": bc})
        plot.append({"x": curve.d_over_R, "y": first, "label": f"{bc} 1 + theta1 d/R",
                     "style": "dashed", "group": bc})
        if bc == "D" and not args.no_oracle:
            pts = np.asarray(args.oracle_points, float)
            oc = oracle_curve(OracleConfig(R=1.0, d=1.0, ell_max=args.ell_max), pts)
            pc = energy_curve(pade, alpha, 1.0 / oc.d_over_R)
            rel = (pc.ratio - oc.ratio) / oc.ratio
            out.csv("figure1_D_oracle.csv",
                    ["d_over_R", "oracle", "oracle_error", "pade", "relative_difference"],
                    zip(oc.d_over_R, oc.ratio, oc.error, pc.ratio, rel))
            plot.append({"x": oc.d_over_R, "y": oc.ratio, "yerr": oc.error, "label": "D oracle",
                         "style": "points", "group": "D"})
    out.plot("figure1.png", plot, title="E/E_PFA")
    out.finish()
    return 0


def cmd_table1(args):
    out = Output(args, "table1")
    curves = _parse_assignments(args.curve, "--curve")
    rows = []
    for bc in ("D", "N", "EM"):
        curve = None
        if bc in curves:
            curve = read_curve_csv(curves[bc])
            out.fixture(f"curve_{bc}", curves[bc])
        elif bc == "D" and not args.no_oracle:
            curve = oracle_curve(OracleConfig(R=1.0, d=1.0, ell_max=args.ell_max), TABLE_FIT_GRID)
            out.curve("table1_D_oracle.csv", curve)
        fit = fit_theta1(curve, tuple(args.range)) if curve is not None else None
        exact = theta1_exact(bc)
        rows.append((bc, None if fit is None else fit.theta1,
                     None if fit is None else fit.theta1_stderr, float(exact), str(exact)))
    header = ["bc", "theta1_fit", "fit_stderr", "theta1_exact", "exact_form"]
    out.text(format_table(header, rows), "table1.txt")
    out.csv("table1.csv", header, rows)
    out.finish()
    return 0


# -- parser -----------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", metavar="DIR", help="write artifacts and a manifest into DIR")
    p.add_argument("--no-plot", action="store_true", help="skip PNG figures")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pfacorr", description="Casimir energies of gently curved surfaces beyond PFA.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    bcs = [b.value for b in BoundaryCondition]

    p = sub.add_parser("coeffs", help="plate-law and gradient coefficients")
    p.add_argument("--bc", required=True, type=str.upper, choices=bcs)
    p.add_argument("--bc2", type=str.upper, choices=["D", "N", "EM"],
                   help="boundary condition of surface 2 (default: as --bc)")
    p.add_argument("--json", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("geometry", help="E/E_PFA sweeps, closed form and quadrature")
    p.add_argument("--shape", required=True,
                   choices=["sphere-plate", "two-spheres", "hyperboloid-plate",
                            "crossed-cylinders", "profiles"])
    p.add_argument("--bc", default="D", type=str.upper, choices=["D", "N", "EM"])
    p.add_argument("--R", type=float, default=1.0, help="radius (apex curvature radius for hyperboloids)")
    p.add_argument("--R2", type=float, help="second radius")
    p.add_argument("--lam", type=float, default=1.0, help="hyperboloid opening")
    p.add_argument("--theta", type=float, nargs="+", default=[90.0], help="axis angles in degrees")
    p.add_argument("--sweep", type=float, nargs=3, default=[1e-3, 1e-2, 7],
                   metavar=("LO", "HI", "N"), help="log-spaced d/R (or d for profiles)")
    p.add_argument("--method", choices=["closed", "quadrature", "both"], default="both")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--lower", help="JSON or CSV descriptor of the lower profile")
    p.add_argument("--upper", help="JSON descriptor of the upper profile; its apex is set to d")
    _add_common(p)
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("kernel-match", help="gamma, delta and beta from a kernel table")
    p.add_argument("--kernel", required=True, help="CSV with columns k,d,G[,mu]")
    p.add_argument("--bc", default="D", type=str.upper, choices=bcs)
    p.add_argument("--d", type=float, nargs="+", help="separations (default: all in the table)")
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--check-beta", action="store_true", help="compare beta with the built-in value")
    _add_common(p)
    p.set_defaults(func=cmd_kernel_match)

    p = sub.add_parser("pade", help="constrained Pade approximant of the force")
    p.add_argument("action", choices=["build", "eval", "thetas", "poles", "curve"])
    p.add_argument("--bc", default="D", type=str.upper, choices=["D", "N", "EM"])
    p.add_argument("--terms", type=int, help="series terms n (default 7 D, 13 N, 15 EM)")
    p.add_argument("--series", help="external series JSON {bc, j0, coefficients, source}")
    p.add_argument("--variant", choices=["force", "energy"], default="force")
    p.add_argument("--r", type=float, nargs="+", help="r = R/d values for eval")
    p.add_argument("--r-max", type=float, default=100.0)
    p.add_argument("--grid", type=float, nargs=3, default=[0.02, 1.0, 50], metavar=("LO", "HI", "N"),
                   help="linear d/R grid for curve")
    _add_common(p)
    p.set_defaults(func=cmd_pade)

    p = sub.add_parser("oracle", help="Dirichlet sphere-plate scattering oracle")
    p.add_argument("action", choices=["energy", "curve", "ae"])
    p.add_argument("--d-over-R", type=float, nargs="+", default=[0.1])
    p.add_argument("--grid", type=float, nargs=3, metavar=("LO", "HI", "N"),
                   help="linear d/R grid (curve default 0.1 1 7, ae default 10 40 8)")
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--ell-max", type=int, help="multipole truncation (default: adaptive)")
    p.add_argument("--n-kappa", type=int, default=120)
    p.add_argument("--terms", type=int, default=4, help="ae: coefficients to estimate (<= 4)")
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit-theta", help="fit theta1, theta2 to an energy curve")
    p.add_argument("--curve", help="CSV d_over_R,E_over_EPFA (default: compute the D oracle)")
    p.add_argument("--range", type=float, nargs=2, default=[0.1, 0.5], metavar=("LO", "HI"))
    p.add_argument("--ell-max", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_fit_theta)

    p = sub.add_parser("figure1", help="E/E_PFA curves: Pade, first correction, oracle")
    p.add_argument("--bc", nargs="+", default=["D", "N"], type=str.upper)
    p.add_argument("--series", nargs="+", metavar="BC=PATH", help="external series fixtures")
    p.add_argument("--x-min", type=float, default=0.01)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--oracle-points", type=float, nargs="+", default=list(FIGURE_ORACLE_POINTS))
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--ell-max", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_figure1, terms=dict(DEFAULT_TERMS))

    p = sub.add_parser("table1", help="theta1: fit to numerical curves against 2 beta - 1")
    p.add_argument("--curve", nargs="+", metavar="BC=PATH", help="external curves per bc")
    p.add_argument("--range", type=float, nargs=2, default=[0.1, 0.5], metavar=("LO", "HI"))
    p.add_argument("--no-oracle", action="store_true", help="do not compute the D oracle curve")
    p.add_argument("--ell-max", type=int)
    _add_common(p)
    p.set_defaults(func=cmd_table1)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"pfacorr: warning: {message}", file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        try:
            return args.func(args)
        except PfaCorrError as exc:
            print(f"pfacorr: error: {exc}", file=sys.stderr)
            return exc.exit_code
        except (OSError, json.JSONDecodeError) as exc:
            print(f"pfacorr: error: {exc}", file=sys.stderr)
            return 2


if __name__ == "__main__":
    sys.exit(main())
