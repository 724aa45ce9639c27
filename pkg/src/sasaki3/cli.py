"""Command-line workflows: ``sasaki3 <command> [flags]``.

Every command prints one JSON report with keys ``command``, ``inputs``,
``residuals``, ``verdict`` and ``runtime_ms``.  Exit status is 0 when the
verdict passes, 1 when a verification fails and 2 on usage errors.
Options may also come from a JSON job file (``--job``); flags win.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .errors import AccuracyError, ConvergenceError, SasakiError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "domain": None,
    "samples": 20,
    "seed": 0,
    "tol": None,
    "v0": 0.0,
    "grid": 65,
    "r": 0.0,
    "boundary": "0",
    "max_iter": 50,
    "e2e_tol": 5e-3,
    "format": "table",
    "quantity": "value",
    "euler_samples": 50,
}

# options whose values may begin with "-" (negative numbers, "-u^2", "-1,1,-1,1")
VALUE_OPTIONS = {"--domain", "--p0", "--p0-tilde", "--R", "--boundary", "--field",
                 "--map-u", "--map-v", "--W"}


class UsageError(Exception):
    pass


def _parse_domain(text):
    from .fields import Disk, Rectangle

    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        parts = [float(x) for x in text]
    elif str(text).startswith("disk"):
        radius = str(text)[4:].strip(":= ") or "1"
        return Disk(float(radius))
    else:
        parts = [float(x) for x in str(text).split(",")]
    if len(parts) != 4 or parts[0] >= parts[1] or parts[2] >= parts[3]:
        raise UsageError(f"domain must be umin,umax,vmin,vmax with min < max, got {text!r}")
    return Rectangle(*parts)


def _expr(text, what):
    from .expr import FieldExpression

    if text is None:
        raise UsageError(f"missing {what} expression")
    return FieldExpression.parse(str(text))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# commands ------------------------------------------------------------------

def cmd_build(opt):
    from .elliptic import GridField, square_count, write_grid_csv
    from .fields import Rectangle
    from .sasaki import build_normal_form

    expr = _expr(opt["p0"], "--p0")
    domain = _parse_domain(opt["domain"]) or Rectangle(-1, 1, -1, 1)
    if not isinstance(domain, Rectangle):
        raise UsageError("build needs a rectangular domain")
    s = build_normal_form(expr.field(), domain=domain, v0=opt["v0"])
    n = int(opt["grid"])
    ny = square_count(domain, n)
    us = np.linspace(domain.umin, domain.umax, n)
    vs = np.linspace(domain.vmin, domain.vmax, ny)
    comps = np.array([[s.metric((opt["r"], u, v)) for v in vs] for u in us])
    names = {"g_rr": (0, 0), "g_ru": (0, 1), "g_rv": (0, 2), "g_uu": (1, 1), "g_uv": (1, 2), "g_vv": (2, 2)}
    files = []
    if opt.get("out"):
        prefix = Path(opt["out"])
        for name, (i, j) in names.items():
            path = prefix.with_name(f"{prefix.name}_{name}.csv")
            write_grid_csv(path, GridField(domain, comps[:, :, i, j]))
            files.append(str(path))
    dets = np.linalg.det(comps)
    return ({"p0": expr.canonical, "domain": str(domain), "grid": [n, ny], "v0": opt["v0"], "r": opt["r"]},
            {"min_det": float(dets.min())},
            True, {"files": files, "nodes": n * ny})


def cmd_verify(opt):
    from .curvature import curvature
    from .sasaki import build_normal_form, reduced_system_check, scalar_curvature_tw, verify_sasakian

    tol = opt["tol"] or 1e-8
    expr = _expr(opt["p0"], "--p0")
    s = build_normal_form(expr.field(), domain=_parse_domain(opt["domain"]), v0=opt["v0"])
    pts = s.sample_points(int(opt["samples"]), seed=int(opt["seed"]))
    rep = verify_sasakian(s, pts, tol)
    R_tensor = np.array([curvature(s.metric, p).scalar for p in pts])
    R_tw = np.array([scalar_curvature_tw(s.p0, p) for p in pts])
    red = reduced_system_check(s, pts)
    residuals = dict(rep.residuals)
    residuals["route_tw_vs_tensor"] = float(np.abs(R_tensor - R_tw).max())
    residuals.update(red)
    ok = rep.passed and residuals["route_tw_vs_tensor"] <= tol and max(red.values()) <= 1e-6
    values = {"R_min": float(R_tensor.min()), "R_max": float(R_tensor.max()),
              "R_mean": float(R_tensor.mean()), "W_mean": float((R_tensor.mean() + 2) / 4),
              "sasakian": "pass" if rep.passed else "fail", "failed_checks": rep.failures}
    return ({"p0": expr.canonical, "domain": str(s.domain), "samples": len(pts), "seed": opt["seed"],
             "tol": tol}, residuals, ok, values)


def cmd_family(opt):
    from .curvature import curvature
    from .eta_einstein import (EtaEinsteinFamily, euler_pullback_residual, family_structure,
                               fit_eta_einstein, random_euler_points, sign_table_row)
    from .sasaki import reduced_system_check, verify_sasakian

    if opt.get("W") is None:
        raise UsageError("family needs --W")
    W = float(opt["W"])
    tol = opt["tol"] or 1e-8
    fam = EtaEinsteinFamily(W)
    s = family_structure(W)
    pts = s.sample_points(int(opt["samples"]), seed=int(opt["seed"]))
    rep = verify_sasakian(s, pts, tol)
    fit = fit_eta_einstein(s, pts)
    R = np.array([curvature(s.metric, p).scalar for p in pts])
    residuals = dict(rep.residuals)
    residuals["scalar_curvature"] = float(np.abs(R - fam.scalar_curvature).max())
    residuals["eta_einstein_fit"] = fit.residual
    residuals["a_plus_b"] = abs(fit.a + fit.b - 2)
    residuals.update(reduced_system_check(s, pts))
    if W != 0:
        pb = [euler_pullback_residual(W, q, s) for q in random_euler_points(W, int(opt["euler_samples"]), int(opt["seed"]))]
        residuals["euler_pullback_metric"] = max(x["metric"] for x in pb)
        residuals["euler_pullback_contact"] = max(x["contact"] for x in pb)
    ok = (rep.passed and fit.is_eta_einstein and residuals["scalar_curvature"] <= 1e-6
          and residuals["a_plus_b"] <= 1e-6 and residuals.get("euler_pullback_metric", 0) <= 1e-6)
    values = {"W": W, "sign_class": fam.sign, "R": float(R.mean()), "a": fit.a, "b": fit.b,
              "sign_of_R": sign_table_row(W), "sasakian": "pass" if rep.passed else "fail",
              "einstein": bool(abs(fit.b) <= 1e-6)}
    return ({"W": W, "domain": str(fam.domain), "samples": len(pts), "seed": opt["seed"], "tol": tol},
            residuals, ok, values)


def cmd_solve(opt):
    from .elliptic import (SolverConfig, end_to_end_residual, solve_prescribed_curvature,
                           tw_residual_field, write_grid_csv)
    from .fields import Rectangle

    R = _expr(opt["R"], "--R")
    bnd = _expr(opt["boundary"], "--boundary")
    domain = _parse_domain(opt["domain"]) or Rectangle(-1, 1, -1, 1)
    if not isinstance(domain, Rectangle):
        raise UsageError("solve needs a rectangular domain")
    config = SolverConfig(max_iter=int(opt["max_iter"]), tol=opt["tol"] or 1e-10)
    res = solve_prescribed_curvature(R.values, domain, int(opt["grid"]), bnd.values, config)
    e2e = end_to_end_residual(res.phi, R.values)
    dense = tw_residual_field(res.phi, R.values, inset=0.05)
    closed = tw_residual_field(res.phi, R.values, inset=0.0)
    if opt.get("out"):
        write_grid_csv(opt["out"], res.p0)
    residuals = {"newton_residual": res.residual, "end_to_end_tensor": e2e,
                 "end_to_end_tw_dense": float(dense.max()),
                 "closed_rectangle_tw": float(closed.max())}
    ok = e2e <= opt["e2e_tol"] and float(dense.max()) <= opt["e2e_tol"]
    values = {"converged": True, "iterations": res.iterations, "h": res.phi.h,
              "residual_history": res.history, "nonmonotone_jacobian": res.nonmonotone,
              "p0_min": float(res.p0.values.min()), "p0_max": float(res.p0.values.max()),
              "inset": 0.05, "output": opt.get("out")}
    return ({"R": R.canonical, "boundary": bnd.canonical, "domain": str(domain),
             "grid": int(opt["grid"]), "tol": config.tol, "e2e_tol": opt["e2e_tol"]},
            residuals, ok, values)


def cmd_conformal(opt):
    from .conformal import FLAT_TOL, conformal_flatness_check
    from .eta_einstein import family_structure
    from .sasaki import build_normal_form

    tol = opt["tol"] or FLAT_TOL
    if opt.get("W") is not None:
        s, source = family_structure(float(opt["W"])), {"W": float(opt["W"])}
    else:
        expr = _expr(opt["p0"], "--p0 or --W")
        s = build_normal_form(expr.field(), domain=_parse_domain(opt["domain"]), v0=opt["v0"])
        source = {"p0": expr.canonical}
    pts = s.sample_points(int(opt["samples"]), seed=int(opt["seed"]))
    rep = conformal_flatness_check(s, pts, tol)
    summary = rep.summary()
    residuals = {"cotton_norm": rep.max_norm, "route_difference": rep.route_difference}
    values = {"flat": rep.flat, "round_signature": rep.round_signature,
              "C00": float(np.mean(rep.C00)), "Cpm": float(np.mean(rep.Cpm)),
              "C00_range": [summary["C00_min"], summary["C00_max"]],
              "Cpm_range": [summary["Cpm_min"], summary["Cpm_max"]]}
    # the report passes when the verdict is computed consistently; flatness is the finding
    ok = rep.route_difference <= 1e-6
    return ({**source, "samples": len(pts), "seed": opt["seed"], "tol": tol}, residuals, ok, values)


def cmd_isometry(opt):
    from .sasaki import contact_isometry_check

    tol = opt["tol"] or 1e-10
    p0 = _expr(opt["p0"], "--p0")
    p0t = _expr(opt.get("p0_tilde") or opt["p0"], "--p0-tilde")
    mu = _expr(opt.get("map_u") or "u", "--map-u")
    mv = _expr(opt.get("map_v") or "v", "--map-v")
    domain = _parse_domain(opt["domain"])
    rng = np.random.default_rng(int(opt["seed"]))
    if domain is None:
        from .fields import Rectangle
        domain = Rectangle(-1, 1, -1, 1)
    u, v = domain.sample(int(opt["samples"]), rng, 0.05)
    res = contact_isometry_check(p0.field(), p0t.field(), lambda a, b: (mu(a, b), mv(a, b)),
                                 np.column_stack([u, v]), tol)
    return ({"p0": p0.canonical, "p0_tilde": p0t.canonical, "map": [mu.canonical, mv.canonical],
             "samples": len(u), "seed": opt["seed"], "tol": tol},
            {"isometry": res.max_residual, "cauchy_riemann": res.cauchy_riemann},
            res.isometric, {"isometric": res.isometric})


def cmd_plot(opt):
    from .elliptic import GridField, read_grid_csv, square_count
    from .fields import Rectangle
    from .plotting import write_ppm, write_table
    from .sasaki import scalar_curvature_tw

    if opt.get("csv"):
        g = read_grid_csv(opt["csv"])
        source = {"csv": str(opt["csv"])}
    else:
        expr = _expr(opt.get("field"), "--field")
        domain = _parse_domain(opt["domain"]) or Rectangle(-1, 1, -1, 1)
        n = int(opt["grid"])
        if opt["quantity"] == "curvature":
            field = expr.field()
            fn = np.vectorize(lambda u, v: scalar_curvature_tw(field, (u, v)))
        else:
            fn = expr.values
        g = GridField.sample(fn, domain, n, square_count(domain, n))
        source = {"field": expr.canonical, "quantity": opt["quantity"], "domain": str(domain), "grid": n}
    if not opt.get("out"):
        raise UsageError("plot needs --out")
    if opt["format"] == "ppm":
        write_ppm(opt["out"], g)
    elif opt["format"] == "table":
        write_table(opt["out"], g)
    else:
        raise UsageError(f"unknown format {opt['format']!r}")
    return ({**source, "format": opt["format"], "out": str(opt["out"])},
            {"min": float(g.values.min()), "max": float(g.values.max())}, True, {"nodes": g.values.size})


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "family": cmd_family, "solve": cmd_solve,
            "conformal": cmd_conformal, "isometry": cmd_isometry, "plot": cmd_plot}


# argument handling -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sasaki3", description=__doc__.splitlines()[0])
    parser.add_argument("--job", help="JSON job file; flags override its entries")
    parser.add_argument("--report", help="also write the JSON report to this path")
    sub = parser.add_subparsers(dest="command")

    def common(p, *names):
        opts = {
            "p0": lambda: p.add_argument("--p0", help="P0(u, v) expression"),
            "domain": lambda: p.add_argument("--domain", help="umin,umax,vmin,vmax or disk:RADIUS"),
            "samples": lambda: p.add_argument("--samples", type=int),
            "seed": lambda: p.add_argument("--seed", type=int),
            "tol": lambda: p.add_argument("--tol", type=float),
            "v0": lambda: p.add_argument("--v0", type=float, help="baseline of the A integral"),
            "grid": lambda: p.add_argument("--grid", type=int, help="nodes along u"),
            "out": lambda: p.add_argument("--out"),
            "W": lambda: p.add_argument("--W", type=float, help="Tanaka-Webster curvature"),
        }
        for n in names:
            opts[n]()
        return p

    common(sub.add_parser("build", help="export metric components on a grid"),
           "p0", "domain", "grid", "v0", "out").add_argument("--r", type=float)
    common(sub.add_parser("verify", help="Sasakian verification of a normal form"),
           "p0", "domain", "samples", "seed", "tol", "v0")
    p = common(sub.add_parser("family", help="eta-Einstein family report"), "W", "samples", "seed", "tol")
    p.add_argument("--euler-samples", type=int)
    p = common(sub.add_parser("solve", help="prescribed scalar curvature"), "domain", "grid", "tol", "out")
    p.add_argument("--R", help="target scalar curvature R(u, v)")
    p.add_argument("--boundary", help="Dirichlet data for ln P0")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--e2e-tol", type=float)
    common(sub.add_parser("conformal", help="Cotton tensor and conformal flatness"),
           "p0", "W", "domain", "samples", "seed", "tol", "v0")
    p = common(sub.add_parser("isometry", help="contact isometry criterion"), "p0", "domain", "samples", "seed", "tol")
    p.add_argument("--p0-tilde")
    p.add_argument("--map-u", help="u as a holomorphic function of (u~, v~), written in u, v")
    p.add_argument("--map-v")
    p = common(sub.add_parser("plot", help="heatmap (PPM) or gnuplot table of a field"), "domain", "grid", "out")
    p.add_argument("--field")
    p.add_argument("--csv")
    p.add_argument("--quantity", choices=["value", "curvature"])
    p.add_argument("--format", choices=["ppm", "table"])
    return parser


def _glue_values(argv):
    """Turn ``--opt -x`` into ``--opt=-x`` for options whose values may start with '-'."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def resolve_options(args, job: dict) -> dict:
    opt = dict(DEFAULTS)
    opt.update({k.replace("-", "_"): v for k, v in job.items() if k != "command"})
    opt.update({k: v for k, v in vars(args).items() if v is not None and k not in ("job", "report")})
    return opt


def run(argv=None) -> tuple[int, dict]:
    """Run one job; returns the exit code and the report."""
    start = time.perf_counter()
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    report = {"command": None, "inputs": {}, "residuals": {}, "verdict": {}, "runtime_ms": 0.0}
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            if exc.code == 0:
                raise
            raise UsageError("invalid arguments") from None
        job = {}
        if args.job:
            try:
                job = json.loads(Path(args.job).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read job file: {exc}") from None
        command = args.command or job.get("command")
        if args.command and job.get("command") and job["command"] != args.command:
            raise UsageError(f"job file is for {job['command']!r}, not {args.command!r}")
        if command not in COMMANDS:
            raise UsageError(f"unknown or missing command {command!r}")
        report["command"] = command
        opt = resolve_options(args, job)
        inputs, residuals, ok, values = COMMANDS[command](opt)
        report["inputs"] = inputs
        report["residuals"] = {k: float(v) for k, v in residuals.items()}
        report["verdict"] = {"status": "pass" if ok else "fail", **values}
        code = EXIT_PASS if ok else EXIT_FAIL
    except (UsageError, SasakiError, ValueError) as exc:
        # numerical failures on valid input count as failed verification
        usage = not isinstance(exc, (ConvergenceError, AccuracyError))
        report["verdict"] = {"status": "error", "error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "history", None):
            report["residuals"] = {"newton_residual": float(exc.history[-1])}
        code = EXIT_USAGE if usage else EXIT_FAIL
    report["runtime_ms"] = round(1000 * (time.perf_counter() - start), 3)
    report = _jsonable(report)
    if "args" in locals() and getattr(args, "report", None):
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
    return code, report


def main(argv=None) -> int:
    code, report = run(argv)
    print(json.dumps(report, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
