"""Batch command-line front end: ``spectra-lab <subcommand> [options]``.

Every subcommand builds a :class:`~spectra_lab.report.RunReport` and prints it
as JSON (default) or CSV.  Exit codes: 0 ok, 1 validation failure, 2 usage or
invalid input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from typing import Callable, Sequence

import numpy as np

from spectra_lab import __version__
from spectra_lab.closed_form import (
    BoundaryCondition,
    circle_spectrum,
    disk_spectrum,
    hydrogen_spectrum,
    interval_spectrum,
    oscillator_spectrum,
    rectangle_spectrum,
    robin,
    triangle_spectrum,
)
from spectra_lab.discretization import laplacian_1d, laplacian_rectangle, quadratic_potential, schrodinger_1d
from spectra_lab.errors import DomainError, SpectraError
from spectra_lab.linalg_eigen import tridiag_eigen
from spectra_lab.report import RunReport, Table
from spectra_lab.scattering_sech import (
    LineGrid,
    omega_grid,
    spectral_decompose,
    weyl_sequence,
)
from spectra_lab.special_functions import sech
from spectra_lab.stability_rd import REACTION_PRESETS, stability_verdict, time_map
from spectra_lab.stability_tf import constant_state_modes, film_preset, film_report
from spectra_lab.variational import bc_comparison, monotonicity_check
from spectra_lab.weyl_asymptotics import area_bounds_check, counting_curve, lattice_eigenvalue

EXIT_OK, EXIT_SUITE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "SPECTRA_LAB_THREADS"
OSCILLATOR_BOX = 10.0


class UsageError(Exception):
    """Flags that parse but do not make sense together."""


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------


def float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _bc(args) -> BoundaryCondition:
    if args.bc == "robin":
        if args.sigma is None:
            raise UsageError("--bc robin needs --sigma")
        return robin(args.sigma)
    return BoundaryCondition(args.bc)


def _reaction(spec: str, messages: list[str]):
    if spec in REACTION_PRESETS:
        return REACTION_PRESETS[spec]
    from spectra_lab.expressions import reaction_from_expression
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        f = reaction_from_expression(spec)
    messages += [str(w.message) for w in caught]
    return f


def _film(spec: str, messages: list[str]):
    try:
        return film_preset(spec)
    except DomainError:
        if spec.startswith("const:"):
            raise
    from spectra_lab.expressions import film_from_expression
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = film_from_expression(spec)
    messages += [str(w.message) for w in caught]
    return g


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def _closed(args, bc: BoundaryCondition, count: int):
    if args.interval is not None:
        return interval_spectrum(args.interval, bc, count)
    if args.rect is not None:
        return rectangle_spectrum(*args.rect, bc, count)
    if args.disk is not None:
        return disk_spectrum(args.disk, bc, count)
    if args.triangle is not None:
        return triangle_spectrum(args.triangle, bc, count)
    if args.circle:
        return circle_spectrum(count)
    if args.oscillator is not None:
        return oscillator_spectrum(args.oscillator, count)
    # hydrogen counts levels; trim the degenerate list to the requested length
    spec = hydrogen_spectrum(math.isqrt(count) + 1)
    return spec.values[:count], spec.labels[:count]


def _fd(args, bc: BoundaryCondition, count: int) -> np.ndarray:
    n = args.n
    if args.interval is not None:
        return tridiag_eigen(laplacian_1d(args.interval, bc, n), count).values
    if args.rect is not None:
        return laplacian_rectangle(*args.rect, bc, n, n).eigenvalues(count)
    if args.oscillator == 1:
        T = schrodinger_1d(quadratic_potential(), OSCILLATOR_BOX, n)
        return tridiag_eigen(T, count).values
    raise UsageError("--method fd supports --interval, --rect and --oscillator 1")


def _domain_tag(args) -> tuple[str, list]:
    for name in ("interval", "rect", "disk", "triangle", "oscillator"):
        v = getattr(args, name)
        if v is not None:
            return name, list(v) if isinstance(v, list) else [v]
    return ("circle", []) if args.circle else ("hydrogen", [])


def cmd_spectrum(args) -> RunReport:
    bc = _bc(args)
    tag, dims = _domain_tag(args)
    params = {"domain": tag, "dims": dims, "bc": str(bc), "count": args.count, "method": args.method}
    if args.method != "closed":
        params["n"] = args.n
    results: dict = {"domain": tag}
    if tag in ("rect", "disk", "triangle"):
        area = {"rect": lambda: dims[0] * dims[1], "disk": lambda: math.pi * dims[0] ** 2,
                "triangle": lambda: math.sqrt(3) / 4 * dims[0] ** 2}[tag]()
        results["area"] = area
    count = args.count
    closed_vals: np.ndarray = np.zeros(0)
    labels: list = []
    if count and args.method in ("closed", "both"):
        spec = _closed(args, bc, count)
        if isinstance(spec, tuple):
            closed_vals, labels = np.asarray(spec[0]), list(spec[1])
        else:
            closed_vals, labels = spec.values, list(spec.labels)
    fd_vals = _fd(args, bc, count) if count and args.method in ("fd", "both") else np.zeros(0)
    if args.method == "closed":
        results.update(values=closed_vals, labels=labels)
        table = Table(["j", "value", "label"],
                      [(j + 1, v, " ".join(map(str, lab)) if isinstance(lab, tuple) else lab)
                       for j, (v, lab) in enumerate(zip(closed_vals, labels))])
    elif args.method == "fd":
        results.update(values=fd_vals)
        table = Table(["j", "value"], [(j + 1, v) for j, v in enumerate(fd_vals)])
    else:
        disc = fd_vals - closed_vals
        results.update(values=closed_vals, labels=labels, fd=fd_vals, discrepancy=disc)
        table = Table(["j", "closed", "fd", "discrepancy"],
                      [(j + 1, a, b, d) for j, (a, b, d) in enumerate(zip(closed_vals, fd_vals, disc))])
    table.comments.append(f"domain={tag} dims={dims} bc={bc}")
    return RunReport([], params, results, table=table)


# ---------------------------------------------------------------------------
# weyl, compare, monotonicity
# ---------------------------------------------------------------------------


def cmd_weyl(args) -> RunReport:
    L, M = args.rect
    bc = _bc(args)
    if bc.tag not in ("dirichlet", "neumann"):
        raise UsageError("weyl counting supports --bc dirichlet or neumann")
    alphas = sorted(set(args.alpha))
    curve = counting_curve(L, M, alphas, bc)
    results = {
        "area": curve.area, "perimeter": curve.perimeter,
        "curve": {"alpha": curve.alphas, "count": curve.counts, "prediction": curve.weyl_prediction(),
                  "lower_bound": curve.lower_bound()},
    }
    status = "ok"
    if bc.tag == "dirichlet":
        reps = [area_bounds_check(L, M, a) for a in alphas]
        results["bounds_hold"] = all(r.lower_ok and r.upper_ok for r in reps)
        status = "ok" if results["bounds_hold"] else "warn"
    if args.j:
        lam = lattice_eigenvalue(L, M, args.j, bc)
        results["ratio"] = {"j": args.j, "lambda": lam, "value": lam * L * M / (4 * math.pi * args.j)}
    rows = list(zip(curve.alphas, curve.counts, curve.weyl_prediction(), curve.lower_bound()))
    table = Table(["alpha", "count", "prediction", "lower_bound"], rows,
                  ["prediction = area alpha / (4 pi); lower_bound subtracts perimeter sqrt(alpha) / (2 pi)"])
    params = {"rect": [L, M], "bc": str(bc), "alpha": alphas, "j": args.j}
    return RunReport([], params, results, status=status, table=table)


def _verdict_report(v, extra: dict) -> RunReport:
    d = v.to_dict()
    table = Table(["theorem", "holds", "worst_margin"], [(d["theorem"], d["holds"], d["worst_margin"])])
    return RunReport([], {**d["parameters"], **extra}, d, status="ok" if v.holds else "warn", table=table)


def cmd_compare(args) -> RunReport:
    if args.sigma <= 0:
        raise UsageError("--sigma must be positive")
    dims = args.interval if args.interval is not None else tuple(args.rect)
    v = bc_comparison(dims, args.sigma, args.n, args.jmax)
    return _verdict_report(v, {"jmax": args.jmax})


def cmd_monotonicity(args) -> RunReport:
    if args.kind == "dirichlet_inclusion":
        if args.outer is None or args.inner is None:
            raise UsageError("dirichlet_inclusion needs --outer L M and --inner l m")
        params = {"outer": tuple(args.outer), "inner": tuple(args.inner)}
    elif args.kind == "neumann_partition":
        if args.rect is None:
            raise UsageError("neumann_partition needs --rect L M")
        params = {"rect": tuple(args.rect)}
    else:
        params = {}
    v = monotonicity_check(args.kind, params, args.jmax)
    return _verdict_report(v, {"kind": args.kind, "jmax": args.jmax})


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------


def cmd_stability_rd(args) -> RunReport:
    if args.s is None and not args.timemap:
        raise UsageError("stability rd needs --s and/or --timemap")
    messages: list[str] = []
    f = _reaction(args.f, messages)
    params = {"f": args.f, "s": args.s, "timemap": args.timemap, "n": args.n, "steps": args.steps}
    results: dict = {}
    table = None
    if args.s is not None:
        ev = stability_verdict(f, args.s, n=args.n, steps=args.steps)
        results.update(ev.to_dict())
        table = Table(["s", "T", "dT_ds", "tau1", "verdict"],
                      [(ev.s, ev.T, ev.dT_ds, ev.tau1, ev.verdict)])
    if args.timemap:
        pairs = time_map(f, args.timemap, steps=args.steps)
        results["timemap"] = {"s": [p[0] for p in pairs], "T": [p[1] for p in pairs]}
        table = Table(["s", "T"], pairs, [f"time map of f = {args.f}"])
    return RunReport([], params, results, status="warn" if messages else "ok", table=table,
                     messages=messages)


def cmd_stability_tf(args) -> RunReport:
    messages: list[str] = []
    g = _film(args.g, messages)
    rep, prof = film_report(g, args.X, args.amplitude, args.center, args.n)
    modes = constant_state_modes(g, prof.mean, args.X, args.kmax)
    results = rep.to_dict()
    results["profile"] = {"x": prof.xs, "H": prof.H}
    results["dispersion"] = {"Hbar": prof.mean, "k": [k for k, _ in modes], "tau": [t for _, t in modes]}
    params = {"g": args.g, "X": args.X, "amplitude": args.amplitude, "center": args.center,
              "n": args.n, "kmax": args.kmax}
    table = Table(["x", "H"], list(zip(prof.xs, prof.H)), [f"steady profile, beta = {rep.beta:.12g}"])
    return RunReport([], params, results, status="warn" if messages else "ok", table=table,
                     messages=messages)


# ---------------------------------------------------------------------------
# sech
# ---------------------------------------------------------------------------


def read_samples(path: str) -> tuple[LineGrid, np.ndarray]:
    """Read ``x,f`` columns (``#`` comments and a header row allowed) onto a line grid."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.reader(lines))
    if rows and not _numeric(rows[0][0]):
        rows = rows[1:]
    try:
        data = np.array([[float(v) for v in r[:2]] for r in rows])
    except (ValueError, IndexError):
        raise DomainError(f"{path}: expected two numeric columns x,f") from None
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 16:
        raise DomainError(f"{path}: expected at least 16 rows of x,f")
    x, f = data[:, 0], data[:, 1]
    grid = LineGrid(float(-x[0]), len(x))
    if np.max(np.abs(grid.xs - x)) > 1e-9 * grid.R:
        raise DomainError(f"{path}: x must be a uniform grid symmetric about 0")
    return grid, f


def _numeric(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def cmd_sech_decompose(args) -> RunReport:
    if (args.input is None) == (args.function is None):
        raise UsageError("give exactly one of --input or --function")
    if args.input is not None:
        grid, f = read_samples(args.input)
        source = {"input": args.input}
    else:
        grid = LineGrid(args.R, args.grid_n)
        f = {"sech": sech, "gaussian": lambda x: np.exp(-x**2)}[args.function](grid.xs)
        source = {"function": args.function, "R": args.R, "grid_n": args.grid_n}
    omegas = omega_grid(args.omega_max, args.omega_count, R=grid.R)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dec = spectral_decompose(f, grid, omegas)
    messages = [str(w.message) for w in caught]
    lhs = grid.norm(f) ** 2
    rhs = 0.5 * abs(dec.c_disc) ** 2 + dec.continuum_energy()
    rows = dec.rows()
    results = {
        "c_disc": dec.c_disc,
        "max_continuum": float(np.max(np.abs(dec.coeffs))),
        "plancherel": {"lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs) / lhs if lhs > 0 else abs(rhs)},
        "reconstruction_error": float(np.max(np.abs(dec.reconstruct() - f))),
        "coefficients": {k: [r[i] for r in rows] for i, k in enumerate(("omega", "re", "im", "weight"))},
    }
    params = {**source, "omega_max": args.omega_max, "omega_count": len(omegas)}
    table = Table(["omega", "re", "im", "weight"], rows,
                  [f"c_disc = {dec.c_disc.real:.12g} {dec.c_disc.imag:+.12g}i"])
    return RunReport([], params, results, status="warn" if messages else "ok", table=table,
                     messages=messages)


def cmd_sech_weyl(args) -> RunReport:
    steps = weyl_sequence(args.lam, args.n, h=args.h, operator=args.operator)
    res = np.array([s.residual for s in steps])
    names = sorted(steps[0].pairings) if steps else []
    results = {
        "steps": [{"n": s.n, "residual": s.residual, "norm": s.norm, "pairings": s.pairings} for s in steps],
        "ratios": res[1:] / res[:-1] if len(res) > 1 else [],
    }
    params = {"lambda": args.lam, "n": args.n, "h": args.h, "operator": args.operator}
    table = Table(["n", "residual", "norm"] + [f"pairing_{k}" for k in names],
                  [(s.n, s.residual, s.norm, *[s.pairings[k] for k in names]) for s in steps])
    return RunReport([], params, results, table=table)


# ---------------------------------------------------------------------------
# validate, plotdata
# ---------------------------------------------------------------------------


def cmd_validate(args) -> RunReport:
    from spectra_lab.suites import run_suite
    checks = run_suite(args.suite)
    failed = [c.name for c in checks if not c.passed]
    results = {"suite": args.suite, "passed": not failed, "failed": failed,
               "checks": [c.to_dict() for c in checks]}
    values = [c.value for c in checks if c.value is not None]
    if args.suite == "comparison" and values:
        results["worst_margin"] = min(values)
    if args.suite == "weyl":
        results["ratio_j10000"] = checks[0].value
    table = Table(["check", "passed", "value"], [(c.name, c.passed, c.value) for c in checks])
    return RunReport([], {"suite": args.suite}, results, status="fail" if failed else "ok", table=table)


PLOT_KINDS = ("counting", "timemap", "profile", "dispersion")


def plot_table(report: dict, kind: str) -> Table:
    """Extract plot-ready columns of ``kind`` from a saved report."""
    cmd = report.get("command", [])
    res = report.get("results", {})
    head = cmd[0] if cmd else ""
    if kind == "counting" and head == "weyl":
        c = res["curve"]
        return Table(["alpha", "count", "prediction"], list(zip(c["alpha"], c["count"], c["prediction"])),
                     ["alpha: spectral parameter", "count: N(alpha)", "prediction: area alpha / (4 pi)"])
    if kind == "counting" and head == "spectrum":
        vals = res.get("values", [])
        area = res.get("area")
        rows = [(v, j + 1, area * v / (4 * math.pi) if area else None) for j, v in enumerate(vals)]
        return Table(["alpha", "count", "prediction"], rows,
                     ["alpha: eigenvalue lambda_j", "count: j", "prediction: area alpha / (4 pi) (2-d domains)"])
    if kind == "timemap" and "timemap" in res:
        t = res["timemap"]
        return Table(["s", "T"], list(zip(t["s"], t["T"])), ["s: initial slope", "T: first zero of U"])
    if kind == "profile" and "profile" in res:
        p = res["profile"]
        return Table(["x", "H"], list(zip(p["x"], p["H"])), ["x: position on one period", "H: film height"])
    if kind == "dispersion" and "dispersion" in res:
        d = res["dispersion"]
        return Table(["k", "tau"], list(zip(d["k"], d["tau"])),
                     [f"constant state Hbar = {d['Hbar']}", "tau(k) = q^2 (q^2 - g(Hbar)), q = 2 pi k / X"])
    raise UsageError(f"report from {head or 'unknown command'!r} has no {kind!r} data")


def cmd_plotdata(args) -> RunReport:
    try:
        with open(args.report) as fh:
            source = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report {args.report}: {exc}") from None
    table = plot_table(source, args.kind)
    results = {"columns": list(table.columns), "rows": [list(r) for r in table.rows]}
    return RunReport([], {"report": args.report, "kind": args.kind}, results, table=table)


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output")
    g.add_argument("--out", choices=("json", "csv"), default=None,
                   help="output format (default json; csv for plotdata)")
    g.add_argument("--quiet", action="store_true", help="print nothing on success")
    g.add_argument("--seed", type=int, default=0, help="recorded in the report for reproducibility")
    g.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    g.add_argument("--save", metavar="PATH", help="also write the JSON report to PATH")
    return p


def _bc_flags(p: argparse.ArgumentParser, choices=("dirichlet", "neumann", "robin", "periodic")):
    p.add_argument("--bc", choices=choices, default="dirichlet")
    p.add_argument("--sigma", type=float, help="Robin parameter")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="spectra-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="closed-form and/or finite-difference spectrum")
    dom = p.add_mutually_exclusive_group(required=True)
    dom.add_argument("--interval", type=float, metavar="L")
    dom.add_argument("--rect", type=float, nargs=2, metavar=("L", "M"))
    dom.add_argument("--disk", type=float, metavar="R")
    dom.add_argument("--triangle", type=float, metavar="SIDE")
    dom.add_argument("--circle", action="store_true")
    dom.add_argument("--oscillator", type=int, metavar="D")
    dom.add_argument("--hydrogen", action="store_true")
    _bc_flags(p)
    p.add_argument("--count", type=nonneg_int, required=True)
    p.add_argument("--method", choices=("closed", "fd", "both"), default="closed")
    p.add_argument("--n", type=int, default=200, help="finite-difference nodes per direction")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("weyl", parents=[common], help="lattice counting function of a rectangle")
    p.add_argument("--rect", type=float, nargs=2, metavar=("L", "M"), required=True)
    _bc_flags(p, ("dirichlet", "neumann"))
    p.add_argument("--alpha", type=float_list, default=[10.0, 100.0, 1000.0, 10000.0])
    p.add_argument("--j", type=int, default=0, help="also report the Weyl ratio of lambda_j")
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("compare", parents=[common], help="Neumann <= Robin <= Dirichlet chain")
    dom = p.add_mutually_exclusive_group(required=True)
    dom.add_argument("--interval", type=float, metavar="L")
    dom.add_argument("--rect", type=float, nargs=2, metavar=("L", "M"))
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--jmax", type=int, default=10)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("monotonicity", parents=[common], help="domain monotonicity checks")
    p.add_argument("--kind", choices=("dirichlet_inclusion", "neumann_partition", "neumann_inclusion"),
                   required=True)
    p.add_argument("--outer", type=float, nargs=2, metavar=("L", "M"))
    p.add_argument("--inner", type=float, nargs=2, metavar=("L", "M"))
    p.add_argument("--rect", type=float, nargs=2, metavar=("L", "M"))
    p.add_argument("--jmax", type=int, default=50)
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("stability", help="stability studies (rd | tf)")
    st = p.add_subparsers(dest="model", required=True)
    q = st.add_parser("rd", parents=[common], help="reaction-diffusion steady states")
    q.add_argument("--f", default="linear_cubic",
                   help="preset (linear, cubic, linear_cubic, linear_minus_cubic) or expression in y")
    q.add_argument("--s", type=float, help="initial slope")
    q.add_argument("--timemap", type=float_list, help="comma-separated slopes for the time map")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--steps", type=int, default=4096)
    q.set_defaults(func=cmd_stability_rd)
    q = st.add_parser("tf", parents=[common], help="periodic thin-film steady states")
    q.add_argument("--g", default="quadratic", help="quadratic, linear, const:<v> or expression in y")
    q.add_argument("--X", type=float, default=2 * math.pi, help="period")
    q.add_argument("--amplitude", type=float, default=0.3)
    q.add_argument("--center", type=float, default=1.0)
    q.add_argument("--n", type=int, default=128)
    q.add_argument("--kmax", type=int, default=8)
    q.set_defaults(func=cmd_stability_tf)

    p = sub.add_parser("sech", help="spectral calculus of -d^2/dx^2 - 2 sech^2 x")
    st = p.add_subparsers(dest="action", required=True)
    q = st.add_parser("decompose", parents=[common], help="bound-state and continuum coefficients")
    q.add_argument("--input", help="CSV with columns x,f on a uniform grid symmetric about 0")
    q.add_argument("--function", choices=("sech", "gaussian"))
    q.add_argument("--R", type=float, default=20.0)
    q.add_argument("--grid-n", type=int, default=4096)
    q.add_argument("--omega-max", type=float, default=4.0)
    q.add_argument("--omega-count", type=int, default=None)
    q.set_defaults(func=cmd_sech_decompose)
    q = st.add_parser("weyl", parents=[common], help="Weyl sequence at a continuum point")
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("--n", type=int_list, default=[4, 8, 16, 32])
    q.add_argument("--h", type=float, default=0.01)
    q.add_argument("--operator", choices=("free", "sech"), default="free")
    q.set_defaults(func=cmd_sech_weyl)

    from spectra_lab.suites import SUITES
    p = sub.add_parser("validate", parents=[common], help="run a validation battery")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plotdata", parents=[common], help="plot-ready CSV from a saved JSON report")
    p.add_argument("--report", required=True)
    p.add_argument("--kind", choices=PLOT_KINDS, required=True)
    p.set_defaults(func=cmd_plotdata)
    return parser


def _threads() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        v = int(raw)
    except ValueError:
        v = 0
    if v < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return v


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = args.out or ("csv" if args.command == "plotdata" else "json")
    start = time.perf_counter()
    try:
        threads = _threads()
        report = args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"spectra-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpectraError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"spectra-lab: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    report.command = argv
    report.parameters["seed"] = args.seed
    if threads is not None:
        report.parameters["threads"] = threads
    if args.timing:
        report.timing = {"seconds": time.perf_counter() - start}
    if args.save:
        with open(args.save, "w") as fh:
            fh.write(report.to_json())
    if not args.quiet:
        sys.stdout.write(report.to_json() if fmt == "json" else report.to_csv())
    return EXIT_SUITE if report.status == "fail" else EXIT_OK


def run(argv: Sequence[str] | None = None) -> None:
    sys.exit(main(argv))


__all__ = ["build_parser", "main", "plot_table", "read_samples", "run"]
