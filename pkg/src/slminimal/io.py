"""File formats: curve blocks, YAML inputs, and CSV/JSON/OBJ outputs.

Every float written by this module uses the 17-significant-digit format
``%.17g``, which round-trips doubles exactly and makes repeated runs
byte-identical.

Curve files hold one component per block; blocks are separated by blank
lines, rows are ``theta t`` (or ``x t`` for half-space curves) and ``#``
starts a comment. Two directives are recognised: ``model half|cyl`` before
the first block and ``through-infinity`` as the first line of a half-space
block whose ends continue as horizontal rays.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np
import yaml

from .boundary import IdealBoundaryCurve
from .errors import BadBoundary, InputFormatError
from .geometry import Model
from .jenkins_serrin import IdealPolygon
from .mesh import Mesh
from .plateau import GridProblem
from .surfaces import (
    CATENOID_PROFILES,
    Catenoid,
    Fan,
    InvariantSurface,
    SlabBigraph,
    Tilted,
    UmbrellaLimit,
    as_graph,
)

FLOAT_FORMAT = "%.17g"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FORMAT % float(x)


# -- JSON ----------------------------------------------------------------------

def _json_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return FLOAT_FORMAT % v
    if isinstance(x, str):
        return json.dumps(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed float formatting; inf and nan become strings."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json_scalar(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_json_scalar(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    return _json_scalar(obj)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


# -- CSV -----------------------------------------------------------------------

def write_csv(path, header: list, rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row[h] for h in header]
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) for v in row] for row in r if row]
    return header, np.array(rows)


# -- OBJ -----------------------------------------------------------------------

def write_obj(path, mesh: Mesh, comment: str = "") -> None:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"# model {mesh.model.value}")
    for v in mesh.vertices:
        lines.append("v " + " ".join(fmt(c) for c in v))
    for f in mesh.faces:
        lines.append("f " + " ".join(str(int(i) + 1) for i in f))
    Path(path).write_text("\n".join(lines) + "\n")


def read_obj(path):
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
    return np.array(verts), np.array(faces, dtype=np.int64)


# -- curves --------------------------------------------------------------------

def parse_curve(text: str) -> IdealBoundaryCurve:
    model = Model.CYLINDER
    blocks, flags = [], []
    current, flag = [], False
    seen_block = False

    def close():
        nonlocal current, flag
        if current:
            blocks.append(np.array(current))
            flags.append(flag)
        current, flag = [], False

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            close()
            continue
        words = line.split()
        if words[0] == "model":
            if seen_block or len(words) != 2:
                raise InputFormatError(f"line {lineno}: 'model' must precede all blocks and take one value")
            try:
                model = Model.parse(words[1])
            except Exception as exc:
                raise InputFormatError(f"line {lineno}: {exc}") from exc
            continue
        if words[0] == "through-infinity":
            if current:
                raise InputFormatError(f"line {lineno}: 'through-infinity' must start a block")
            flag = True
            seen_block = True
            continue
        if len(words) != 2:
            raise InputFormatError(f"line {lineno}: expected two numbers, got {line!r}")
        try:
            current.append([float(words[0]), float(words[1])])
        except ValueError as exc:
            raise InputFormatError(f"line {lineno}: {exc}") from exc
        seen_block = True
    close()
    if not blocks:
        raise InputFormatError("curve file has no vertices")
    return IdealBoundaryCurve(blocks, model, flags)


def read_curve(path) -> IdealBoundaryCurve:
    return parse_curve(Path(path).read_text())


def format_curve(curve: IdealBoundaryCurve) -> str:
    lines = [f"model {curve.model.value}"]
    for arr, inf in zip(curve.components, curve.through_infinity):
        lines.append("")
        if inf:
            lines.append("through-infinity")
        lines.extend(f"{fmt(a)} {fmt(b)}" for a, b in arr)
    return "\n".join(lines) + "\n"


def write_curve(path, curve: IdealBoundaryCurve) -> None:
    Path(path).write_text(format_curve(curve))


# -- YAML inputs ---------------------------------------------------------------

def load_yaml(path) -> dict:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InputFormatError(f"{path}: expected a mapping at the top level")
    return data


_FAMILY_BUILDERS = {
    "slab-bigraph": lambda p: SlabBigraph(float(p.get("d", 1.0))),
    "tilted": lambda p: Tilted(float(p.get("d", 1.0)), float(p.get("l", 0.0))),
    "fan": lambda p: Fan(float(p.get("c", 0.5))),
    "catenoid": lambda p: Catenoid(float(p.get("c", 10.0)), str(p.get("profile", CATENOID_PROFILES[0]))),
    "umbrella": lambda p: UmbrellaLimit(float(p.get("lam", 0.0))),
}


_FAMILY_PARAMS = {
    "slab-bigraph": {"d"},
    "tilted": {"d", "l"},
    "fan": {"c"},
    "catenoid": {"c", "profile"},
    "umbrella": {"lam"},
}


def build_surface(family: str, params: dict, tau: float, sign: int = 1) -> InvariantSurface:
    if family not in _FAMILY_BUILDERS:
        raise InputFormatError(f"unknown family {family!r}; choose from {sorted(_FAMILY_BUILDERS)}")
    unknown = set(params) - _FAMILY_PARAMS[family]
    if unknown:
        raise InputFormatError(f"{family} takes {sorted(_FAMILY_PARAMS[family])}, not {sorted(unknown)}")
    try:
        fam = _FAMILY_BUILDERS[family](params)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"bad parameters for {family}: {exc}") from exc
    return InvariantSurface(fam, int(sign), float(tau))


def polygon_from_dict(data: dict) -> IdealPolygon:
    """Polygon schema: angles (radians) or angles_deg, horocycle_sizes, include_origin."""
    if "angles" in data:
        angles = [float(a) for a in data["angles"]]
    elif "angles_deg" in data:
        angles = [math.radians(float(a)) for a in data["angles_deg"]]
    else:
        raise InputFormatError("polygon needs 'angles' or 'angles_deg'")
    sizes = data.get("horocycle_sizes")
    if sizes is None:
        raise InputFormatError("polygon needs 'horocycle_sizes'")
    if isinstance(sizes, (int, float)):
        sizes = [float(sizes)] * len(angles)
    return IdealPolygon(tuple(angles), tuple(float(s) for s in sizes), bool(data.get("include_origin", True)))


def read_polygon(path) -> IdealPolygon:
    return polygon_from_dict(load_yaml(path))


def _side_interpolant(rows: np.ndarray, problem_box, tol=1e-9):
    x0, x1, y0, y1 = problem_box
    sides = {
        "bottom": (np.abs(rows[:, 1] - y0) < tol, 0),
        "top": (np.abs(rows[:, 1] - y1) < tol, 0),
        "left": (np.abs(rows[:, 0] - x0) < tol, 1),
        "right": (np.abs(rows[:, 0] - x1) < tol, 1),
    }
    tables = {}
    for name, (mask, axis) in sides.items():
        sub = rows[mask]
        if len(sub) < 2:
            raise BadBoundary(f"tabulated boundary needs at least two points on the {name} side")
        order = np.argsort(sub[:, axis])
        tables[name] = (sub[order, axis], sub[order, 2], axis)

    def boundary(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.full(x.shape, np.nan)
        for name, mask_fn in (("bottom", np.abs(y - y0) < tol), ("top", np.abs(y - y1) < tol),
                                ("left", np.abs(x - x0) < tol), ("right", np.abs(x - x1) < tol)):
            coord, vals, axis = tables[name]
            q = x if axis == 0 else y
            sel = mask_fn & np.isnan(out)
            out[sel] = np.interp(q[sel], coord, vals)
        return out

    return boundary


def problem_from_dict(data: dict, base: Path = Path(".")) -> tuple:
    """Problem schema; returns (GridProblem, tol, description).

    domain: [x0, x1, y0, y1]    grid: [nx, ny]    tau: float    tol: float
    boundary: one of
      {family: name, params: {...}, sign: +1|-1}   values of a family sheet
      {constant: k}
      {linear: {l: slope, c: offset}}              t = l x + c
      {table: path}                                CSV rows x,y,t on the four sides
    """
    try:
        x0, x1, y0, y1 = (float(v) for v in data["domain"])
        nx, ny = (int(v) for v in data["grid"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"problem needs domain [x0, x1, y0, y1] and grid [nx, ny]: {exc}") from exc
    tau = float(data.get("tau", 0.0))
    tol = float(data.get("tol", 1e-9))
    spec = data.get("boundary")
    if not isinstance(spec, dict):
        raise InputFormatError("problem needs a 'boundary' mapping")
    exact = None
    if "family" in spec:
        surf = build_surface(str(spec["family"]), spec.get("params", {}) or {}, tau, int(spec.get("sign", 1)))
        g = as_graph(surf)

        def boundary(x, y):
            return g.eval(x, y)

        exact = boundary
        desc = {"boundary": "family", **surf.describe()}
    elif "constant" in spec:
        k = float(spec["constant"])

        def boundary(x, y):
            return k + 0.0 * np.asarray(x, dtype=float)

        exact = boundary
        desc = {"boundary": "constant", "value": k}
    elif "linear" in spec:
        lin = spec["linear"] or {}
        l, c = float(lin.get("l", 0.0)), float(lin.get("c", 0.0))

        def boundary(x, y):
            return l * np.asarray(x, dtype=float) + c

        exact = boundary
        desc = {"boundary": "linear", "l": l, "c": c}
    elif "table" in spec:
        _, rows = read_csv(base / spec["table"])
        if rows.ndim != 2 or rows.shape[1] != 3:
            raise InputFormatError("boundary table must have columns x,y,t")
        boundary = _side_interpolant(rows, (x0, x1, y0, y1))
        desc = {"boundary": "table", "path": str(spec["table"])}
    else:
        raise InputFormatError("boundary must give family, constant, linear or table")
    problem = GridProblem(x0, x1, y0, y1, nx, ny, boundary, tau, exact)
    return problem, tol, desc


def read_problem(path):
    path = Path(path)
    return problem_from_dict(load_yaml(path), path.parent)
