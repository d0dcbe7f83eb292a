"""Coordinate models of SL2~(R) = E(-1, tau), their metrics and isometries.

Two charts are supported. The half-space model lives on {y > 0} x R with
conformal factor ``lam = 1/y``; the cylinder model lives on the unit disk
times R with ``lam = 2/(1 - x^2 - y^2)``. In either chart the metric is

    g = lam^2 (dx^2 + dy^2) + (2 tau (lam_y/lam dx - lam_x/lam dy) + dt)^2

and the vertical field d/dt is a unit Killing field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    BoundaryPoint,
    DeterminantError,
    IdealPole,
    NonpositiveRadius,
    WrongModel,
)

BOUNDARY_EPS = 1e-14
DET_TOL = 1e-12
DEFAULT_ATOL = 1e-10


class Model(enum.Enum):
    HALF_SPACE = "half"
    CYLINDER = "cyl"

    @classmethod
    def parse(cls, value) -> "Model":
        if isinstance(value, Model):
            return value
        key = str(value).strip().lower()
        aliases = {
            "half": cls.HALF_SPACE,
            "half-space": cls.HALF_SPACE,
            "halfspace": cls.HALF_SPACE,
            "half_space": cls.HALF_SPACE,
            "cyl": cls.CYLINDER,
            "cylinder": cls.CYLINDER,
        }
        if key not in aliases:
            raise WrongModel(f"unknown model {value!r}")
        return aliases[key]


class _Infinity:
    """The ideal point at infinity of the half-plane boundary."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def is_infinity(x) -> bool:
    return x is INFINITY


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    t: float
    model: Model = Model.HALF_SPACE

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t], dtype=float)

    def is_interior(self) -> bool:
        return conformal_factor(self.x, self.y, self.model) > BOUNDARY_EPS


def conformal_factor(x: float, y: float, model: Model) -> float:
    """The hyperbolic conformal factor lam(x, y); -1 off the chart."""
    if model is Model.HALF_SPACE:
        return 1.0 / y if y > 0 else -1.0
    q = 1.0 - x * x - y * y
    return 2.0 / q if q > 0 else -1.0


def connection_coefficients(x, y, tau: float, model: Model):
    """Return (lam, a, b) with a = 2 tau lam_y/lam and b = -2 tau lam_x/lam."""
    if model is Model.HALF_SPACE:
        lam = 1.0 / y
        a = -2.0 * tau / y
        b = 0.0 * np.asarray(x, dtype=float)
        return lam, a, b
    q = 1.0 - x * x - y * y
    lam = 2.0 / q
    a = 4.0 * tau * y / q
    b = -4.0 * tau * x / q
    return lam, a, b


def _check_interior(p: Point3) -> None:
    if not (math.isfinite(p.x) and math.isfinite(p.y) and math.isfinite(p.t)):
        raise BoundaryPoint(f"non-finite coordinates {p}")
    lam = conformal_factor(p.x, p.y, p.model)
    if lam <= BOUNDARY_EPS:
        raise BoundaryPoint(f"{p} is not an interior point of the {p.model.value} model")


def metric_at(p: Point3, tau: float) -> np.ndarray:
    """Metric tensor in the coordinate basis (d/dx, d/dy, d/dt)."""
    _check_interior(p)
    lam, a, b = connection_coefficients(p.x, p.y, tau, p.model)
    lam2 = lam * lam
    return np.array(
        [
            [lam2 + a * a, a * b, a],
            [a * b, lam2 + b * b, b],
            [a, b, 1.0],
        ]
    )


def _require(p: Point3, model: Model) -> None:
    if p.model is not model:
        raise WrongModel(f"expected a {model.value} point, got {p.model.value}")


def to_cylinder(p: Point3, tau: float) -> Point3:
    """Half-space to cylinder: w = (z - i)/(z + i), t -> t - 4 tau arctan(x/(y + 1))."""
    _require(p, Model.HALF_SPACE)
    _check_interior(p)
    z = complex(p.x, p.y)
    w = (z - 1j) / (z + 1j)
    t = p.t - 4.0 * tau * math.atan(p.x / (p.y + 1.0))
    return Point3(w.real, w.imag, t, Model.CYLINDER)


def to_half_space(p: Point3, tau: float) -> Point3:
    """Cylinder to half-space: z = i(1 + w)/(1 - w), t -> t - 4 tau arctan(y/(1 - x))."""
    _require(p, Model.CYLINDER)
    _check_interior(p)
    w = complex(p.x, p.y)
    z = (1j + 1j * w) / (1.0 - w)
    t = p.t - 4.0 * tau * math.atan(p.y / (1.0 - p.x))
    return Point3(z.real, z.imag, t, Model.HALF_SPACE)


def change_model(p: Point3, tau: float, model: Model) -> Point3:
    if p.model is model:
        return p
    return to_cylinder(p, tau) if model is Model.CYLINDER else to_half_space(p, tau)


@dataclass(frozen=True)
class MoebiusIsometry:
    """Lift of z -> (az + b)/(cz + d) to the half-space model, plus a vertical shift."""

    a: float
    b: float
    c: float
    d: float
    t0: float = 0.0
    model: Model = Model.HALF_SPACE

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not abs(det - 1.0) <= DET_TOL:
            raise DeterminantError(f"ad - bc = {det!r}, expected 1")

    @classmethod
    def identity(cls) -> "MoebiusIsometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def normalized(cls, a, b, c, d, t0=0.0) -> "MoebiusIsometry":
        """Rescale (a, b, c, d) by 1/sqrt(ad - bc), which must be positive."""
        det = a * d - b * c
        if det <= 0:
            raise DeterminantError(f"ad - bc = {det!r} is not positive")
        s = 1.0 / math.sqrt(det)
        return cls(a * s, b * s, c * s, d * s, t0)

    def mobius(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def pole(self):
        """Boundary point sent to infinity, or INFINITY when c = 0."""
        return INFINITY if self.c == 0 else -self.d / self.c


def apply_isometry(f: MoebiusIsometry, p: Point3, tau: float) -> Point3:
    _require(p, Model.HALF_SPACE)
    _check_interior(p)
    a, b, c, d = f.a, f.b, f.c, f.d
    x, y = p.x, p.y
    if c == 0:
        return Point3((a * x + b) / d, a * a * y, p.t + f.t0, Model.HALF_SPACE)
    e = d + c * x
    den = e * e + c * c * y * y
    # real part of (az + b)(c conj(z) + d) / |cz + d|^2, free of the 1/c cancellation
    xn = ((a * x + b) * e + a * c * y * y) / den
    yn = y / den
    tn = p.t - 4.0 * tau * math.atan(e / (c * y)) + f.t0
    return Point3(xn, yn, tn, Model.HALF_SPACE)


def apply_isometry_boundary(f: MoebiusIsometry, q, tau: float):
    """Extend ``f`` to the vertical ideal boundary {y = 0} x R.

    ``q`` is a pair (x, t) where x may be INFINITY. For c != 0 the t-shift
    is +2 tau pi left of the pole -d/c and -2 tau pi right of it, so both the
    pole and the point at infinity are jump points and raise IdealPole.
    With c = 0 the point at infinity is fixed.
    """
    x, t = q
    a, b, c, d = f.a, f.b, f.c, f.d
    if c == 0:
        if is_infinity(x):
            return INFINITY, t + f.t0
        return (a * x + b) / d, t + f.t0
    if is_infinity(x):
        raise IdealPole("the point at infinity is a jump point when c != 0")
    pole = -d / c
    if x == pole:
        raise IdealPole(f"x = {x!r} is sent to infinity")
    xn = (a * x + b) / (c * x + d)
    # sign of (cx + d)/c decides which branch of arctan survives as y -> 0
    shift = -2.0 * tau * math.pi if x > pole else 2.0 * tau * math.pi
    return xn, t + shift + f.t0


def boundary_jump(f: MoebiusIsometry, tau: float, eps: float = 1e-9) -> float:
    """t-jump of the boundary extension across its pole (left minus right limit)."""
    pole = f.pole()
    if is_infinity(pole):
        return 0.0
    scale = max(1.0, abs(pole))
    left = apply_isometry_boundary(f, (pole - eps * scale, 0.0), tau)[1]
    right = apply_isometry_boundary(f, (pole + eps * scale, 0.0), tau)[1]
    return left - right


@dataclass(frozen=True)
class VerticalTranslation:
    t0: float


@dataclass(frozen=True)
class HyperbolicTranslation:
    axis_c: float
    lam: float


@dataclass(frozen=True)
class ParabolicTranslation:
    a: float


@dataclass(frozen=True)
class Rotation:
    angle: float


def special_isometry(kind, p: Point3) -> Point3:
    """Apply one of the elementary isometries that need no tau correction."""
    if isinstance(kind, VerticalTranslation):
        return replace(p, t=p.t + kind.t0)
    if isinstance(kind, HyperbolicTranslation):
        _require(p, Model.HALF_SPACE)
        if not kind.lam > 0:
            raise WrongModel("hyperbolic translation needs lam > 0")
        c, lam = kind.axis_c, kind.lam
        return Point3(c + lam * (p.x - c), lam * p.y, p.t, Model.HALF_SPACE)
    if isinstance(kind, ParabolicTranslation):
        _require(p, Model.HALF_SPACE)
        return Point3(p.x + kind.a, p.y, p.t, Model.HALF_SPACE)
    if isinstance(kind, Rotation):
        _require(p, Model.CYLINDER)
        ca, sa = math.cos(kind.angle), math.sin(kind.angle)
        return Point3(ca * p.x - sa * p.y, sa * p.x + ca * p.y, p.t, Model.CYLINDER)
    raise TypeError(f"unknown isometry kind {kind!r}")


def polar_metric_at(r: float, theta: float, tau: float) -> np.ndarray:
    """Cylinder metric in geodesic polar coordinates (r, theta, t) about the axis."""
    if not r > 0:
        raise NonpositiveRadius(f"r = {r!r} must be positive")
    s2 = math.sinh(r / 2.0) ** 2
    sh = math.sinh(r)
    g_tt_mix = -4.0 * tau * s2
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, sh * sh + g_tt_mix * g_tt_mix, g_tt_mix],
            [0.0, g_tt_mix, 1.0],
        ]
    )


def polar_to_cylinder(r: float, theta: float, t: float) -> Point3:
    rho = math.tanh(r / 2.0)
    return Point3(rho * math.cos(theta), rho * math.sin(theta), t, Model.CYLINDER)


# Boundary transport between the two models. Half-space boundary points are
# (x, t) with x real or INFINITY; cylinder boundary points are (theta, t).


def boundary_to_cylinder(x, t: float, tau: float):
    """Boundary extension of the half-space to cylinder map."""
    if is_infinity(x):
        raise IdealPole("the point at infinity is the jump point of the transport")
    return math.pi + 2.0 * math.atan(x), t - 4.0 * tau * math.atan(x)


def boundary_to_half_space(theta: float, t: float, tau: float):
    """Boundary extension of the cylinder to half-space map, theta taken mod 2 pi."""
    th = math.fmod(theta, 2.0 * math.pi)
    if th < 0:
        th += 2.0 * math.pi
    if th == 0.0:
        raise IdealPole("theta = 0 is sent to the point at infinity")
    x = -1.0 / math.tan(th / 2.0)
    return x, t - 2.0 * tau * math.pi + 2.0 * tau * th


def numerical_jacobian(fmap: Callable[[np.ndarray], np.ndarray], v: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian refined by one Richardson step."""
    v = np.asarray(v, dtype=float)
    n = v.size

    def central(step):
        cols = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = step
            vp, vm = v + e, v - e
            # divide by the step actually taken so that affine maps differentiate exactly
            cols.append((fmap(vp) - fmap(vm)) / (vp[i] - vm[i]))
        return np.column_stack(cols)

    j1 = central(h)
    j2 = central(h / 2.0)
    return j2 + (j2 - j1) / 3.0
