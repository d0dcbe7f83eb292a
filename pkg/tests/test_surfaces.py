import math
import warnings

import numpy as np
import pytest

from slminimal.errors import BadParameter, NoBracket
from slminimal.numerics import find_root
from slminimal.surfaces import (
    Catenoid,
    Fan,
    InvariantSurface,
    NearSingularWarning,
    SlabBigraph,
    Tilted,
    UmbrellaLimit,
    as_graph,
    asymptotic_boundary,
    catenoid_neck_height,
    catenoid_root,
    critical_height,
    fan_total_height,
    sample_points,
    tilted_height,
    umbrella_limit,
)

SQRT2_PI_HALF = math.sqrt(2) * math.pi / 2


def test_slab_closed_form_value():
    g = as_graph(InvariantSurface(SlabBigraph(1.0), 1, 0.0))
    assert g.eval(0.0, 0.5) == pytest.approx(math.pi / 6, abs=1e-15)


def test_tilted_height_base_cases():
    assert tilted_height(1.0, 0.0, 0.0) == pytest.approx(math.pi / 2, rel=1e-12)
    for d in (0.5, 1.0, 2.0):
        assert tilted_height(d, 0.0, 0.5) == pytest.approx(SQRT2_PI_HALF, rel=1e-10)


def test_tilted_height_bracketed_for_opposite_signs():
    h = tilted_height(1.0, -1.0, 0.5)
    assert SQRT2_PI_HALF <= h <= math.sqrt(5) * math.pi / 2


def test_fan_rectangles_are_tall():
    assert fan_total_height(0.5, 0.0) > math.pi
    assert fan_total_height(0.5, 0.5) > math.sqrt(2) * math.pi


def test_fan_height_grows_towards_c_one():
    # the height increases as c -> 1-, see the decisions ledger
    assert fan_total_height(0.9, 0.0) > fan_total_height(0.5, 0.0)


def transcribed_oracle(c):
    # bisection on the transcribed neck equation, independent of the library root finder
    f = lambda t: -3 + t * t + c * t - 4 * t * math.log(t)  # noqa: E731
    lo, hi = 1e-12, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_catenoid_root_transcribed_matches_bisection():
    assert catenoid_root(10, "transcribed") == pytest.approx(transcribed_oracle(10), abs=1e-12)
    assert catenoid_root(10, "transcribed") == pytest.approx(0.175, abs=1e-3)


def test_catenoid_root_minimal_closed_form():
    for c in (4, 10, 50):
        assert catenoid_root(c) == pytest.approx(2 / (c + math.sqrt(c * c - 4)), rel=1e-13)


def test_catenoid_root_exists_for_c4():
    f = lambda t: -3 + t * t + 4 * t - 4 * t * math.log(t)  # noqa: E731
    assert f(1.0) == pytest.approx(2.0) and f(1e-12) < 0
    assert 0 < find_root(f, 1e-12, 1.0) < 1


@pytest.mark.parametrize("profile", ["minimal", "transcribed"])
def test_catenoid_neck_below_half_threshold(profile):
    assert catenoid_neck_height(10, 0.5, profile) < SQRT2_PI_HALF
    assert catenoid_neck_height(10, 0.0, profile) < math.pi / 2


def test_catenoid_gradient_blows_up_like_inverse_sqrt():
    g = as_graph(InvariantSurface(Catenoid(10), 1, 0.5))
    r0 = catenoid_root(10)
    rates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        for delta in (1e-6, 1e-9, 1e-12):
            r = r0 + delta
            y = (1 - math.sqrt(r)) / (1 + math.sqrt(r))
            rates.append(math.hypot(*g.grad(0.0, y)) * math.sqrt(delta))
    assert max(rates) / min(rates) < 1.01
    assert rates[-1] / math.sqrt(1e-12) > 1e5


def test_umbrella_examples():
    assert umbrella_limit(0.0, (1.0, 1.0), 0.5) == pytest.approx(math.pi / 2, abs=1e-15)
    assert abs(umbrella_limit(1e8, (1.0, 1.0), 0.5)) < 1e-7
    for lam in (0.0, 1.0, 3.0):
        assert umbrella_limit(lam, (0.0, 2.0), 0.5) == 0.0


def test_near_singular_warns():
    g = as_graph(InvariantSurface(SlabBigraph(1.0), 1, 0.5))
    with pytest.warns(NearSingularWarning):
        g.eval(0.0, 1.0 - 1e-12)


def test_bad_parameters():
    with pytest.raises(BadParameter):
        InvariantSurface(SlabBigraph(-1.0), 1, 0.5)
    with pytest.raises(NoBracket):
        InvariantSurface(Catenoid(1.5), 1, 0.5)


def test_tilted_without_slope_is_slab():
    xs, ys = np.linspace(-1, 1, 9), np.full(9, 0.4)
    a = as_graph(InvariantSurface(Tilted(2.0, 0.0), 1, 0.5)).eval(xs, ys)
    b = as_graph(InvariantSurface(SlabBigraph(0.5), 1, 0.5)).eval(xs, ys)
    assert np.max(np.abs(a - b)) < 1e-10


@pytest.mark.parametrize("fam,mirror", [
    (SlabBigraph(1.0), SlabBigraph(1.0)),
    (Tilted(1.0, 1.0), Tilted(1.0, -1.0)),
    (Fan(0.5), Fan(0.5)),
    (Fan(2.0), Fan(2.0)),
    (Catenoid(10.0), Catenoid(10.0)),
    (UmbrellaLimit(1.0), UmbrellaLimit(1.0)),
])
def test_tau_mirror(fam, mirror):
    s = InvariantSurface(fam, 1, 0.5)
    x, y = sample_points(s, 60)
    u = as_graph(s).eval(x, y)
    v = as_graph(InvariantSurface(mirror, -1, -0.5)).eval(x, y)
    assert np.max(np.abs(u + v)) < 1e-10


def test_boundary_traces():
    tr = asymptotic_boundary(InvariantSurface(SlabBigraph(1.0), 1, 0.5))
    assert tr.gap == pytest.approx(critical_height(0.5), abs=1e-14)
    assert np.allclose(tr.pieces[1][:, 1], SQRT2_PI_HALF)
    tr = asymptotic_boundary(InvariantSurface(Tilted(1.0, 1.0), 1, 0.5))
    assert tr.gap == pytest.approx(2 * tilted_height(1.0, 1.0, 0.5))
    tr = asymptotic_boundary(InvariantSurface(Catenoid(10.0), 1, 0.5))
    h = catenoid_neck_height(10, 0.5)
    x, t = tr.pieces[1][:, 0], tr.pieces[1][:, 1]
    assert np.allclose(t, 2 * np.arctan(x) + h, atol=1e-12)
