import math

import numpy as np
import pytest

from slminimal.boundary import (
    Direction,
    IdealBoundaryCurve,
    check_theorem12_hypotheses,
    check_theorem13_hypothesis,
    height_function,
    height_infimum,
    height_profile,
    is_tall,
    polygon_curve,
    tallness_report,
    transport_boundary,
    two_circles,
)
from slminimal.errors import DegenerateFiber, IdealPole, InvalidCurve
from slminimal.geometry import Model
from slminimal.surfaces import critical_height

HALF = Model.HALF_SPACE
TWO_PI = 2 * math.pi


def half_curve(points, through_infinity=False):
    return IdealBoundaryCurve([np.array(points, dtype=float)], HALF, [through_infinity])


def rectangle(x0, x1, t0, t1):
    return np.array([[x0, t0], [x1, t0], [x1, t1], [x0, t1]], dtype=float)


# -- height function ---------------------------------------------------------------

def test_two_circles_constant_height():
    c = two_circles(1.0)
    assert all(height_function(c, p) == pytest.approx(1.0) for p in np.linspace(0.1, 6.2, 9))


def test_single_circle_is_infinite():
    c = IdealBoundaryCurve([two_circles(1.0).components[0]])
    assert height_function(c, 1.0) == math.inf
    assert height_infimum(c).value == math.inf


def test_sinusoidal_gap():
    c = two_circles(0.0, n=720, upper=lambda th: 1 + 0.5 * np.sin(th))
    ps = np.linspace(0.05, 6.2, 31)
    # between vertices the polyline differs from the sine by at most the chord sag
    assert np.allclose(height_profile(c, ps), 1 + 0.5 * np.sin(ps), atol=3e-5)
    inf = height_infimum(c)
    assert inf.value == pytest.approx(0.5, abs=1e-12)
    assert inf.location == pytest.approx(1.5 * math.pi, abs=1e-12)


def test_vertical_segment_counts_as_curve():
    c = IdealBoundaryCurve([rectangle(0.0, 1.0, 0.0, 2.0), rectangle(-1.0, 2.0, -3.0, 4.0)], HALF)
    assert height_function(c, 0.0) == pytest.approx(2.0)
    with pytest.raises(DegenerateFiber):
        height_function(c, 0.0, strict=True)


def test_self_intersection_rejected():
    with pytest.raises(InvalidCurve):
        half_curve([[0, 0], [1, 1], [1, 0], [0, 1]])


# -- tallness --------------------------------------------------------------------------

@pytest.mark.parametrize("h,tau,tall", [(5, 0.5, True), (4, 0.5, False), (4, 0.0, True)])
def test_tallness_examples(h, tau, tall):
    assert is_tall(two_circles(h), tau) is tall


def test_tallness_report_shape():
    rep = tallness_report(two_circles(4.0), 0.0)
    assert rep["tall"] and rep["inf_height"] == 4.0 and rep["threshold"] == math.pi


# -- short-interval checker ------------------------------------------------------------

def test_short_interval_full_circle():
    res = check_theorem13_hypothesis(two_circles(4.0), 0.5)
    assert res.holds and res.full_circle


def test_short_interval_fails_for_tall_pair():
    assert not check_theorem13_hypothesis(two_circles(5.0), 0.5).holds


def test_short_interval_subthreshold_arc():
    c = two_circles(0.0, n=720, upper=lambda th: 3 + 1.5 * np.sin(th))
    res = check_theorem13_hypothesis(c, 0.0)
    s = math.asin((math.pi - 3) / 1.5)
    assert res.holds and not res.full_circle
    lo, hi = res.interval
    # the polyline crosses pi within a chord sag of the sine crossing
    assert lo == pytest.approx(math.pi - s, abs=1e-4)
    assert hi == pytest.approx(TWO_PI + s, abs=1e-4)


# -- fold-witness checker --------------------------------------------------------------

def folded(extent):
    """A through-infinity curve folding at x = 0 and x = -1 along vertical runs.

    The run on x = 0 is touched from the left with the given extent; the run
    on x = -1 is touched from the right and is one unit longer.
    """
    top = 2 * extent + 1
    return half_curve([[-3, 0], [0, 0], [0, extent], [-1, extent], [-1, top], [3, top]], True)


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0])
def test_fold_witness_witness_for_small_fold(tau):
    res = check_theorem12_hypotheses(folded(1.0), tau)
    assert res.holds
    w = res.witness
    assert w.line == 0.0 and w.side == "left"
    assert w.t0 < 0.0 and 1.0 < w.t0 + critical_height(tau)


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0])
def test_fold_witness_no_witness_for_tall_fold(tau):
    res = check_theorem12_hypotheses(folded(critical_height(tau) + 1.0), tau)
    assert not res.holds and res.witness is None


def test_fold_witness_single_vertex_fold():
    c = half_curve([[-2, 0], [1, 0.5], [-2, 1], [3, 3]], True)
    res = check_theorem12_hypotheses(c, 0.0)
    assert res.holds and res.witness.line == 1.0 and res.witness.side == "left"


def test_fold_witness_monotone_line_has_no_witness():
    res = check_theorem12_hypotheses(half_curve([[-5, 0], [5, 0]], True), 0.0)
    assert not res.holds and res.candidates == 0


def test_fold_witness_closed_rectangle_sides():
    assert check_theorem12_hypotheses(IdealBoundaryCurve([rectangle(0, 1, 0, 2)], HALF), 0.0).holds
    assert not check_theorem12_hypotheses(IdealBoundaryCurve([rectangle(0, 1, 0, 5)], HALF), 0.0).holds


# -- transport ------------------------------------------------------------------------

def test_horizontal_line_image():
    tau = 0.5
    img = transport_boundary(half_curve([[-4, 0], [4, 0]], True), Direction.HALF_TO_CYL, tau, resolution=64)
    arr = img.components[0]
    inside = arr[(arr[:, 0] > 0) & (arr[:, 0] < TWO_PI)]
    assert np.allclose(inside[:, 1], math.pi - inside[:, 0], atol=1e-12)
    seam = np.sort(arr[arr[:, 0] == 0.0][:, 1])
    assert seam[-1] - seam[0] == pytest.approx(4 * tau * math.pi, abs=1e-12)


def test_transport_tau_zero_only_reparametrizes():
    c = IdealBoundaryCurve([rectangle(-1, 1, 0, 1)], HALF)
    img = transport_boundary(c, "half-to-cyl", 0.0, resolution=16).components[0]
    x, t = -1 / np.tan(img[:, 0] / 2), img[:, 1]
    on_sides = np.isclose(np.abs(x), 1.0, atol=1e-12) & (t >= 0) & (t <= 1)
    on_lids = np.isclose(t, 0.0, atol=1e-15) | np.isclose(t, 1.0, atol=1e-15)
    assert np.all(on_sides | on_lids) and np.all(np.abs(x) <= 1 + 1e-12)


def test_transport_round_trip_cylinder():
    c = two_circles(3.0, n=32, lower=lambda th: 0.3 * np.cos(th))
    back = transport_boundary(transport_boundary(c, "cyl-to-half", 0.5, 32), "half-to-cyl", 0.5, 32)
    for orig in c.components:
        img = min(back.components, key=lambda a: abs(np.mean(a[:, 1]) - np.mean(orig[:, 1])))
        for th, t in orig[1:]:
            j = np.argmin(np.abs(img[:, 0] - th))
            assert img[j, 0] == pytest.approx(th, abs=1e-10) and img[j, 1] == pytest.approx(t, abs=1e-10)


def test_transport_round_trip_half_space():
    c = IdealBoundaryCurve([rectangle(-1, 2, -1, 1)], HALF)
    back = transport_boundary(transport_boundary(c, "half-to-cyl", 0.5, 8),
                              "cyl-to-half", 0.5, 8)
    img = back.components[0]
    for x, t in c.components[0]:
        d = np.hypot(img[:, 0] - x, img[:, 1] - t)
        assert d.min() < 1e-10


def test_transport_keeps_tallness():
    c = IdealBoundaryCurve([rectangle(-1, 1, -2.5, 2.5), rectangle(-3, 3, -6, 6)], HALF)
    for res in (4, 64, 512):
        img = transport_boundary(c, "half-to-cyl", 0.5, res)
        for tau in (0.0, 0.5):
            assert is_tall(img, tau) == is_tall(c, tau)
        assert height_infimum(img).value == pytest.approx(3.5, abs=1e-12)


def test_transport_pole_cases():
    lines = IdealBoundaryCurve([np.array([[-5.0, 0.0], [5.0, 0.0]]), np.array([[-5.0, 5.0], [5.0, 5.0]])],
                               HALF, [True, True])
    with pytest.raises(IdealPole):
        transport_boundary(lines, "half-to-cyl", 0.5)
    seam_loop = polygon_curve([0.0, 1.0, 0.5], [0.0, 0.0, 1.0])
    with pytest.raises(IdealPole):
        transport_boundary(seam_loop, "cyl-to-half", 0.5)
