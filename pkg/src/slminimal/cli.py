"""Command-line front end.

Settings come from flags first, then from the YAML file given by
``--config`` (a mapping with an optional top-level ``parallel`` and one
section per command group such as ``surface``, ``annulus`` or ``solve``),
then from built-in defaults. Library errors exit with status 2 and a JSON
object {"error": ..., "message": ...} on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BadParameter, InputFormatError, SLMinimalError
from .geometry import Model

DEFAULTS = {
    "surface": {"tau": 0.0, "sign": 1, "model": "half", "n_u": 61, "n_v": 61, "extent": 2.0,
                "samples": 200, "tol": None, "margin": 0.05},
    "annulus": {"tau": 0.5, "rho_bar_range": "0.25:8:32", "ratio": 1.25, "rel_tol": 1e-10},
    "boundary": {"tau": 0.0, "resolution": 256, "samples": 721},
    "js": {},
    "solve": {"tol": None},
}

FAMILY_FLAGS = ("d", "l", "c", "lam", "profile")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        from .io import dumps
        sys.stderr.write(dumps({"error": "UsageError", "message": message}) + "\n")
        raise SystemExit(2)


def _settings(args, group: str, keys) -> dict:
    """Merge flags over the config section over the defaults."""
    from .io import load_yaml
    merged = dict(DEFAULTS.get(group, {}))
    if args.config:
        cfg = load_yaml(args.config)
        section = cfg.get(group, {}) or {}
        if not isinstance(section, dict):
            raise InputFormatError(f"config section {group!r} must be a mapping")
        merged.update({k.replace("-", "_"): v for k, v in section.items()})
        if args.parallel is None and "parallel" in cfg:
            args.parallel = int(cfg["parallel"])
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return merged


def _workers(args) -> int:
    return max(1, int(args.parallel or 1))


def _emit(obj, path=None) -> None:
    from .io import dumps, write_json
    if path:
        write_json(path, obj)
    sys.stdout.write(dumps(obj) + "\n")


def _surface_from(args, cfg):
    from .io import build_surface
    params = dict(cfg.get("params", {}) or {})
    for key in FAMILY_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    for item in args.param or []:
        if "=" not in item:
            raise InputFormatError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    family = args.family or cfg.get("family")
    if not family:
        raise InputFormatError("a surface family is required (--family)")
    return build_surface(family, params, float(cfg["tau"]), int(cfg["sign"]))


# -- commands ------------------------------------------------------------------

def cmd_surface_mesh(args) -> int:
    from .io import write_obj
    from .mesh import surface_mesh
    cfg = _settings(args, "surface", ["tau", "sign", "model", "n_u", "n_v", "extent"])
    surf = _surface_from(args, cfg)
    mesh = surface_mesh(surf, Model.parse(cfg["model"]), int(cfg["n_u"]), int(cfg["n_v"]), float(cfg["extent"]))
    write_obj(args.out, mesh, comment=json.dumps(surf.describe(), sort_keys=True))
    if args.plot:
        from .plotting import plot_mesh
        plot_mesh(mesh.vertices, mesh.faces, args.plot)
    lo, hi = mesh.t_range()
    _emit({"out": str(args.out), "vertices": int(len(mesh.vertices)), "faces": int(len(mesh.faces)),
           "t_range": [lo, hi], "model": mesh.model.value})
    return 0


def cmd_surface_verify(args) -> int:
    from .minimality import verify_surface
    cfg = _settings(args, "surface", ["tau", "sign", "samples", "tol", "margin"])
    surf = _surface_from(args, cfg)
    tol = None if cfg["tol"] is None else float(cfg["tol"])
    rep = verify_surface(surf, int(cfg["samples"]), tol, float(cfg["margin"]), workers=_workers(args))
    _emit(rep.to_dict(), args.json)
    return 0 if rep.passed else 1


def cmd_surface_trace(args) -> int:
    from .io import write_csv
    from .surfaces import asymptotic_boundary
    cfg = _settings(args, "surface", ["tau", "sign"])
    surf = _surface_from(args, cfg)
    trace = asymptotic_boundary(surf)
    if args.out:
        rows = [(i, x, t) for i, piece in enumerate(trace.pieces) for x, t in piece]
        write_csv(args.out, ["piece", "x", "t"], rows)
    _emit(trace.to_dict())
    return 0


def _parse_range(text: str):
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError as exc:
        raise InputFormatError(f"range must be a:b:n, got {text!r}") from exc
    if n < 1 or not (0 < a <= b):
        raise BadParameter("range needs 0 < a <= b and n >= 1")
    return np.linspace(a, b, n)


SWEEP_COLUMNS = ["rho_bar", "rho", "tau", "area_disk", "area_annulus", "margin", "gap"]


def cmd_annulus_sweep(args) -> int:
    from .annulus import douglas_sweep
    from .io import write_csv
    cfg = _settings(args, "annulus", ["tau", "rho_bar_range", "ratio", "rel_tol"])
    rbs = _parse_range(str(cfg["rho_bar_range"]))
    rows = douglas_sweep(float(cfg["tau"]), rbs, float(cfg["ratio"]), float(cfg["rel_tol"]), _workers(args))
    write_csv(args.out, SWEEP_COLUMNS, rows)
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(rows, args.plot)
    signs = np.sign([r["margin"] for r in rows])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    _emit({"out": str(args.out), "rows": len(rows), "sign_changes": changes})
    return 0


def cmd_annulus_threshold(args) -> int:
    from .annulus import douglas_threshold, gap_limit
    cfg = _settings(args, "annulus", ["tau", "ratio"])
    thr = douglas_threshold(float(cfg["tau"]), float(cfg["ratio"]))
    _emit({"tau": float(cfg["tau"]), "ratio": float(cfg["ratio"]), "threshold_rho_bar": thr,
           "gap_limit": gap_limit(float(cfg["tau"]))})
    return 0


def cmd_annulus_audit(args) -> int:
    from .annulus import AnnulusSpec, lemma42_audit
    cfg = _settings(args, "annulus", ["tau"])
    rep = lemma42_audit(AnnulusSpec(float(args.rho_bar), float(args.rho), float(cfg["tau"])), int(args.n_theta))
    _emit(rep, args.json)
    return 0 if rep["holds"] else 1


def cmd_boundary_tall(args) -> int:
    from .boundary import height_profile, tallness_report
    from .io import read_curve
    cfg = _settings(args, "boundary", ["tau", "samples"])
    curve = read_curve(args.curve)
    rep = tallness_report(curve, float(cfg["tau"]))
    _emit(rep, args.json)
    if args.plot:
        from .plotting import plot_height_profile
        if curve.model is Model.CYLINDER:
            ps = np.linspace(0.0, 2 * math.pi, int(cfg["samples"]))
        else:
            xs = np.concatenate([c[:, 0] for c in curve.components])
            ps = np.linspace(xs.min() - 1.0, xs.max() + 1.0, int(cfg["samples"]))
        plot_height_profile(ps, height_profile(curve, ps), rep["threshold"], args.plot,
                            "theta" if curve.model is Model.CYLINDER else "x")
    return 0


def cmd_boundary_check(args) -> int:
    from .boundary import check_theorem12_hypotheses, check_theorem13_hypothesis
    from .io import read_curve
    cfg = _settings(args, "boundary", ["tau"])
    curve = read_curve(args.curve)
    tau = float(cfg["tau"])
    _emit({"vertical_line_subarc": check_theorem12_hypotheses(curve, tau).to_dict(),
           "short_interval": check_theorem13_hypothesis(curve, tau).to_dict()}, args.json)
    return 0


_DIRECTIONS = {"half2cyl": "half-to-cyl", "cyl2half": "cyl-to-half",
               "half-to-cyl": "half-to-cyl", "cyl-to-half": "cyl-to-half"}


def cmd_boundary_transport(args) -> int:
    from .boundary import transport_boundary
    from .io import format_curve, read_curve, write_curve
    cfg = _settings(args, "boundary", ["tau", "resolution"])
    curve = read_curve(args.curve)
    out = transport_boundary(curve, _DIRECTIONS[args.dir], float(cfg["tau"]), int(cfg["resolution"]))
    if args.out:
        write_curve(args.out, out)
    else:
        sys.stdout.write(format_curve(out))
    return 0


def cmd_js_check(args) -> int:
    from .io import read_polygon
    from .jenkins_serrin import jenkins_serrin_check
    poly = read_polygon(args.polygon)
    res = jenkins_serrin_check(poly, workers=_workers(args))
    _emit(res.to_dict(), args.json)
    return 0


def cmd_solve(args) -> int:
    from .io import read_problem, write_csv, write_json, write_obj
    from .mesh import Mesh, _dedupe, _grid_faces
    from .plateau import solve
    cfg = _settings(args, "solve", ["tol"])
    problem, tol, desc = read_problem(args.problem)
    if cfg["tol"] is not None:
        tol = float(cfg["tol"])
    sol = solve(problem, tol=tol)
    rows = zip(sol.X.ravel(), sol.Y.ravel(), sol.U.ravel())
    write_csv(args.out, ["x", "y", "t"], rows)
    report = {"problem": desc, "nx": problem.nx, "ny": problem.ny, "tau": problem.tau, "tol": tol,
              "iterations": sol.iterations, "residual": sol.residual,
              "at_rounding_floor": sol.at_rounding_floor, "trace": sol.trace}
    if problem.exact is not None:
        report["max_error_vs_boundary_function"] = sol.max_error()
    if args.obj:
        # nodes are stored row-major in y, so transpose to the (x, y) grid ordering of the mesh
        verts = np.column_stack([sol.X.T.ravel(), sol.Y.T.ravel(), sol.U.T.ravel()])
        v, f = _dedupe(verts, _grid_faces(problem.nx, problem.ny))
        write_obj(args.obj, Mesh(v, f, Model.HALF_SPACE))
    if args.json:
        write_json(args.json, report)
    if args.plot:
        from .plotting import plot_solution
        plot_solution(sol.X, sol.Y, sol.U, args.plot)
    _emit({k: report[k] for k in report if k != "trace"})
    return 0


# -- parser --------------------------------------------------------------------

def _family_args(p):
    p.add_argument("--family", help="slab-bigraph, tilted, fan, catenoid or umbrella")
    p.add_argument("--d", type=float)
    p.add_argument("--l", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--lam", type=float)
    p.add_argument("--profile", choices=["minimal", "transcribed"])
    p.add_argument("--param", "--params", dest="param", action="extend", nargs="+", metavar="KEY=VALUE")
    p.add_argument("--sign", type=int, choices=[1, -1])
    p.add_argument("--tau", type=float)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slminimal", description="Minimal surfaces in the universal cover of PSL2(R).")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="YAML file of settings (flags take precedence)")
    p.add_argument("--parallel", type=int, help="worker budget for modules that allow it")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    s = sub.add_parser("surface", help="invariant minimal surfaces: meshes, residuals, boundary traces").add_subparsers(dest="action", required=True, parser_class=_Parser)
    m = s.add_parser("mesh", help="OBJ mesh of a glued invariant surface")
    _family_args(m)
    m.add_argument("--model", choices=["half", "cyl"])
    m.add_argument("--n-u", dest="n_u", type=int)
    m.add_argument("--n-v", dest="n_v", type=int)
    m.add_argument("--extent", type=float)
    m.add_argument("--out", required=True)
    m.add_argument("--plot")
    m.set_defaults(func=cmd_surface_mesh)
    v = s.add_parser("verify", help="minimality residuals at sampled points")
    _family_args(v)
    v.add_argument("--samples", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--margin", type=float)
    v.add_argument("--json")
    v.set_defaults(func=cmd_surface_verify)
    t = s.add_parser("trace", help="asymptotic boundary of a glued surface")
    _family_args(t)
    t.add_argument("--out")
    t.set_defaults(func=cmd_surface_trace)

    a = sub.add_parser("annulus", help="area comparison for catenoidal annuli").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sw = a.add_parser("sweep", help="Douglas margin over a range of neck parameters")
    sw.add_argument("--tau", type=float)
    sw.add_argument("--rho-bar-range", dest="rho_bar_range")
    sw.add_argument("--ratio", type=float)
    sw.add_argument("--rel-tol", dest="rel_tol", type=float)
    sw.add_argument("--out", required=True)
    sw.add_argument("--plot")
    sw.set_defaults(func=cmd_annulus_sweep)
    th = a.add_parser("threshold", help="neck parameter where the Douglas margin changes sign")
    th.add_argument("--tau", type=float)
    th.add_argument("--ratio", type=float)
    th.set_defaults(func=cmd_annulus_threshold)
    au = a.add_parser("audit", help="grid audit of the v' and integral bounds")
    au.add_argument("--tau", type=float)
    au.add_argument("--rho-bar", dest="rho_bar", type=float, required=True)
    au.add_argument("--rho", type=float, required=True)
    au.add_argument("--n-theta", dest="n_theta", type=int, default=10_000)
    au.add_argument("--json")
    au.set_defaults(func=cmd_annulus_audit)

    b = sub.add_parser("boundary", help="asymptotic boundary curves").add_subparsers(dest="action", required=True, parser_class=_Parser)
    bt = b.add_parser("tall", help="tallness verdict for a boundary curve")
    bt.add_argument("--curve", required=True)
    bt.add_argument("--tau", type=float)
    bt.add_argument("--samples", type=int)
    bt.add_argument("--json")
    bt.add_argument("--plot")
    bt.set_defaults(func=cmd_boundary_tall)
    bc = b.add_parser("check", help="non-existence hypotheses for a boundary curve")
    bc.add_argument("--curve", required=True)
    bc.add_argument("--tau", type=float)
    bc.add_argument("--json")
    bc.set_defaults(func=cmd_boundary_check)
    tr = b.add_parser("transport", help="carry a curve between the two models")
    tr.add_argument("--curve", required=True)
    tr.add_argument("--dir", required=True, choices=sorted(_DIRECTIONS))
    tr.add_argument("--tau", type=float)
    tr.add_argument("--resolution", type=int)
    tr.add_argument("--out")
    tr.set_defaults(func=cmd_boundary_transport)

    j = sub.add_parser("js", help="ideal polygons with infinite boundary data").add_subparsers(dest="action", required=True, parser_class=_Parser)
    jc = j.add_parser("check", help="Jenkins-Serrin conditions for an ideal polygon")
    jc.add_argument("--polygon", required=True)
    jc.add_argument("--json")
    jc.set_defaults(func=cmd_js_check)

    so = sub.add_parser("solve", help="Dirichlet problem for a minimal graph over a rectangle")
    so.add_argument("--problem", required=True)
    so.add_argument("--out", required=True)
    so.add_argument("--tol", type=float)
    so.add_argument("--obj")
    so.add_argument("--json")
    so.add_argument("--plot")
    so.set_defaults(func=cmd_solve)
    return p


def run(argv=None) -> int:
    from .io import dumps
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except SLMinimalError as exc:
        sys.stderr.write(dumps(exc.to_dict()) + "\n")
        return 2
    except OSError as exc:
        sys.stderr.write(dumps({"error": "IOError", "message": str(exc)}) + "\n")
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
