import math

import numpy as np
import pytest

from slminimal.errors import DeterminantError, IdealPole, WrongModel
from slminimal.geometry import (
    INFINITY,
    HyperbolicTranslation,
    Model,
    MoebiusIsometry,
    ParabolicTranslation,
    Point3,
    Rotation,
    VerticalTranslation,
    apply_isometry,
    apply_isometry_boundary,
    boundary_jump,
    boundary_to_cylinder,
    boundary_to_half_space,
    metric_at,
    polar_metric_at,
    special_isometry,
    to_cylinder,
    to_half_space,
)
from slminimal.minimality import verify_isometry

CYL = Model.CYLINDER


def test_metric_product_case():
    assert np.array_equal(np.abs(metric_at(Point3(0, 1, 0), 0.0)), np.eye(3))


def test_metric_half_space_tau_half():
    g = metric_at(Point3(0, 1, 0), 0.5)
    expected = np.array([[2.0, 0, -1], [0, 1, 0], [-1, 0, 1]])
    assert np.allclose(g, expected, atol=1e-15)


@pytest.mark.parametrize("tau", [0.0, 0.5, 3.0])
def test_metric_cylinder_origin(tau):
    assert np.allclose(metric_at(Point3(0, 0, 5, CYL), tau), np.diag([4.0, 4.0, 1.0]), atol=1e-15)


def test_model_change_fixes_base_points():
    p = to_cylinder(Point3(0, 1, 0), 0.5)
    assert (p.x, p.y, p.t, p.model) == (0.0, 0.0, 0.0, CYL)
    q = to_half_space(Point3(0, 0, 0, CYL), 0.5)
    assert (q.x, q.y, q.t) == (0.0, 1.0, 0.0)


def test_model_change_round_trip():
    p = Point3(0.3, 0.7, 1.2)
    q = to_half_space(to_cylinder(p, 0.5), 0.5)
    assert np.allclose(q.as_array(), p.as_array(), atol=1e-12)


def test_model_change_rejects_wrong_model():
    with pytest.raises(WrongModel):
        to_cylinder(Point3(0, 0, 0, CYL), 0.5)


def test_identity_isometry():
    p = Point3(0.4, 2.0, -1.0)
    assert apply_isometry(MoebiusIsometry.identity(), p, 0.7) == p


def test_parabolic_translation():
    p = apply_isometry(MoebiusIsometry(1, 2, 0, 1), Point3(0, 1, 0), 0.5)
    assert (p.x, p.y, p.t) == (2.0, 1.0, 0.0)


def test_inversion_shift_at_base_point():
    p = apply_isometry(MoebiusIsometry(0, -1, 1, 1), Point3(0, 1, 0), 0.5)
    assert p.t == pytest.approx(-math.pi / 2, abs=1e-15)


def test_determinant_checked():
    with pytest.raises(DeterminantError):
        MoebiusIsometry(1, 1, 1, 1)


def test_boundary_extension_branches():
    f = MoebiusIsometry(0, -1, 1, 1)
    x, t = apply_isometry_boundary(f, (1.0, 0.0), 0.5)
    assert x == pytest.approx(-0.5) and t == pytest.approx(-math.pi)
    x, t = apply_isometry_boundary(f, (-2.0, 0.0), 0.5)
    assert x == pytest.approx(1.0) and t == pytest.approx(math.pi)
    assert apply_isometry_boundary(MoebiusIsometry.identity(), (3.0, 1.0), 0.5) == (3.0, 1.0)


def test_boundary_extension_poles():
    f = MoebiusIsometry(0, -1, 1, 1)
    with pytest.raises(IdealPole):
        apply_isometry_boundary(f, (-1.0, 0.0), 0.5)
    with pytest.raises(IdealPole):
        apply_isometry_boundary(f, (INFINITY, 0.0), 0.5)
    assert apply_isometry_boundary(MoebiusIsometry(1, 3, 0, 1), (INFINITY, 2.0), 0.5) == (INFINITY, 2.0)


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0, -0.5])
def test_boundary_jump_is_four_tau_pi(tau):
    assert boundary_jump(MoebiusIsometry(0, -1, 1, 1), tau) == pytest.approx(4 * tau * math.pi, abs=1e-10)


def test_special_isometries():
    assert special_isometry(HyperbolicTranslation(0, 2), Point3(1, 1, 5)) == Point3(2, 2, 5)
    r = special_isometry(Rotation(math.pi), Point3(0.5, 0, 3, CYL))
    assert np.allclose(r.as_array(), [-0.5, 0, 3], atol=1e-15)
    assert special_isometry(VerticalTranslation(-3), Point3(0, 1, 3)) == Point3(0, 1, 0)
    assert special_isometry(ParabolicTranslation(1.5), Point3(0, 1, 3)) == Point3(1.5, 1, 3)


def test_polar_metric_product_case():
    g = polar_metric_at(1.0, 0.3, 0.0)
    assert np.allclose(g, np.diag([1.0, math.sinh(1.0) ** 2, 1.0]), atol=1e-15)


def test_boundary_maps_are_inverse():
    for x in (-3.0, -0.2, 0.0, 0.7, 5.0):
        th, t = boundary_to_cylinder(x, 1.0, 0.5)
        x2, t2 = boundary_to_half_space(th, t, 0.5)
        assert x2 == pytest.approx(x, abs=1e-12) and t2 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(IdealPole):
        boundary_to_cylinder(INFINITY, 0.0, 0.5)
    with pytest.raises(IdealPole):
        boundary_to_half_space(0.0, 0.0, 0.5)


def test_isometry_checks():
    assert verify_isometry(lambda p: p, 0.5, 50) < 1e-12
    assert verify_isometry(lambda p: to_cylinder(p, 0.5), 0.5, 50) < 1e-7
    assert verify_isometry(lambda p: Point3(2 * p.x, p.y, p.t), 0.5, 10) > 1e-1
