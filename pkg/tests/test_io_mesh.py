import json
import math

import numpy as np
import pytest

from slminimal.errors import InputFormatError
from slminimal.geometry import Model
from slminimal.io import (
    build_surface,
    dumps,
    format_curve,
    parse_curve,
    polygon_from_dict,
    problem_from_dict,
    read_csv,
    read_obj,
    write_csv,
    write_obj,
)
from slminimal.mesh import surface_mesh
from slminimal.plateau import solve
from slminimal.surfaces import Catenoid, Fan, InvariantSurface, SlabBigraph, Tilted, UmbrellaLimit

FAMILIES = [SlabBigraph(1.0), Tilted(1.0, 1.0), Fan(0.5), Fan(1.0), Fan(2.5), Catenoid(10.0), UmbrellaLimit(1.0)]


def test_slab_mesh_height_range():
    mesh = surface_mesh(InvariantSurface(SlabBigraph(1.0), 1, 0.5), Model.HALF_SPACE, 41, 201)
    lo, hi = mesh.t_range()
    h = math.sqrt(2) * math.pi / 2
    assert hi == -lo and h - 5e-3 < hi <= h


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: type(f).__name__)
@pytest.mark.parametrize("model", ["half", "cyl"])
def test_meshes_are_finite_patches(fam, model):
    mesh = surface_mesh(InvariantSurface(fam, 1, 0.5), model, 21, 21)
    assert np.all(np.isfinite(mesh.vertices))
    assert len(np.unique(np.round(mesh.vertices, 12), axis=0)) == len(mesh.vertices)
    # a single grid patch (an annulus for the catenoid) has a short boundary
    assert mesh.boundary_edges() <= 4 * 21


def test_catenoid_mesh_is_closed_around():
    mesh = surface_mesh(InvariantSurface(Catenoid(10.0), 1, 0.5), "half", 24, 15)
    # the angular direction wraps, so only the two rims are boundary
    assert mesh.boundary_edges() == 2 * 24


def test_obj_round_trip(tmp_path):
    mesh = surface_mesh(InvariantSurface(Fan(0.5), 1, 0.5), "cyl", 9, 9)
    path = tmp_path / "m.obj"
    write_obj(path, mesh, "fan")
    v, f = read_obj(path)
    assert np.array_equal(v, mesh.vertices) and np.array_equal(f, mesh.faces)
    assert "# model cyl" in path.read_text()


def test_json_format():
    text = dumps({"a": 0.1, "b": [1, math.inf], "c": {"d": True, "e": None}})
    assert '"a": 0.10000000000000001' in text
    data = json.loads(text)
    assert data["b"] == [1, "inf"] and data["c"] == {"d": True, "e": None}


def test_csv_round_trip(tmp_path):
    rows = [(0.1, 2.0, -1e-300), (math.pi, 0.0, 5.0)]
    write_csv(tmp_path / "x.csv", ["a", "b", "c"], rows)
    header, arr = read_csv(tmp_path / "x.csv")
    assert header == ["a", "b", "c"] and np.array_equal(arr, np.array(rows))


CURVE = """\
model half
# an inner and an outer rectangle
-1 -1
1 -1
1 1
-1 1

through-infinity
-5 -4
5 -4
"""


def test_curve_parsing_round_trip():
    c = parse_curve(CURVE)
    assert c.model is Model.HALF_SPACE and list(c.through_infinity) == [False, True]
    again = parse_curve(format_curve(c))
    assert all(np.array_equal(a, b) for a, b in zip(c.components, again.components))
    assert list(again.through_infinity) == [False, True]


@pytest.mark.parametrize("text", ["", "model half\n1 2 3\n", "1 2\nmodel cyl\n", "model sphere\n1 2\n",
                                  "1 x\n", "1 2\nthrough-infinity\n"])
def test_curve_parse_errors(text):
    with pytest.raises(InputFormatError):
        parse_curve(text)


def test_build_surface_errors():
    assert isinstance(build_surface("tilted", {"d": "1", "l": 2}, 0.5).family, Tilted)
    with pytest.raises(InputFormatError):
        build_surface("helicoid", {}, 0.5)
    with pytest.raises(InputFormatError):
        build_surface("slab-bigraph", {"radius": 1}, 0.5)


def test_polygon_schema():
    p = polygon_from_dict({"angles_deg": [0, 120, 240], "horocycle_sizes": 0.3})
    assert p.angles[1] == pytest.approx(2 * math.pi / 3) and p.include_origin
    with pytest.raises(InputFormatError):
        polygon_from_dict({"horocycle_sizes": 0.3})


def test_problem_schema_variants(tmp_path):
    base = {"domain": [-1, 1, 0.2, 0.8], "grid": [9, 9], "tau": 0.5}
    pr, tol, desc = problem_from_dict({**base, "boundary": {"linear": {"l": 0.5, "c": 1}}})
    assert desc["boundary"] == "linear" and tol == 1e-9
    s = solve(pr)
    # write the exact sides as a table and solve again from the file
    X, Y = pr.nodes()
    mask = (X == -1) | (X == 1) | (Y == 0.2) | (Y == 0.8)
    write_csv(tmp_path / "sides.csv", ["x", "y", "t"], zip(X[mask], Y[mask], (0.5 * X + 1)[mask]))
    pr2, _, desc2 = problem_from_dict({**base, "boundary": {"table": "sides.csv"}}, tmp_path)
    assert desc2["boundary"] == "table"
    assert np.max(np.abs(solve(pr2).U - s.U)) < 1e-10
    with pytest.raises(InputFormatError):
        problem_from_dict({**base, "boundary": {"spline": 1}})
    with pytest.raises(InputFormatError):
        problem_from_dict({"grid": [9, 9], "boundary": {"constant": 1}})
