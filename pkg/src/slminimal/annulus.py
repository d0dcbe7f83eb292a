"""Douglas-criterion comparison for compact annuli between two horizontal slices.

A circle of hyperbolic radius rho about the axis bounds a flat disk in each
slice. The competitor annulus, in polar coordinates (r, theta, t) of the
cylinder model, is

    Y(r, theta) = (r, theta, +-u(r) + v(theta)),   rho_bar < r < rho,

with u = k U, k = sqrt(1 + 4 tau^2), U the profile of the product-space
catenoid with neck rho_bar and v the angular shift that keeps both boundary
circles in horizontal slices of the half-space model. If twice the disk area
exceeds the annulus area, an area-minimizing annulus exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter
from .numerics import SingularIntegral, find_root, integrate
from .surfaces import stretch

REL_TOL = 1e-10


@dataclass(frozen=True)
class AnnulusSpec:
    rho_bar: float
    rho: float
    tau: float = 0.0

    def __post_init__(self):
        if not (0 < self.rho_bar < self.rho and math.isfinite(self.rho) and math.isfinite(self.tau)):
            raise BadParameter(f"need 0 < rho_bar < rho, got rho_bar={self.rho_bar!r}, rho={self.rho!r}")


def disk_area(rho: float, tau: float) -> float:
    """Area of the disk of hyperbolic radius rho in a horizontal slice."""
    if rho < 0:
        raise BadParameter("rho must be nonnegative")
    return 2.0 * math.pi * stretch(tau) * 2.0 * math.sinh(rho / 2.0) ** 2


def _neck_factor(rho_bar, delta):
    """sinh(rho_bar) / sqrt(sinh^2(rho_bar + delta) - sinh^2(rho_bar)) without overflow."""
    return (2.0 * math.sinh(rho_bar) * np.exp(-rho_bar - delta)
            / np.sqrt(-np.expm1(-2.0 * delta) * -np.expm1(-4.0 * rho_bar - 2.0 * delta)))


def catenoid_profile_U(r: float, spec: AnnulusSpec, rel_tol: float = 1e-12) -> float:
    """U(r) = int_{rho_bar}^r sinh(rho_bar) / sqrt(sinh^2 s - sinh^2 rho_bar) ds; r may be inf."""
    rb = spec.rho_bar
    if r < rb:
        raise BadParameter(f"U is defined for r >= rho_bar, got r={r!r}")
    if r == rb:
        return 0.0

    def f(s, da, db):
        return _neck_factor(rb, da)

    res = integrate(SingularIntegral(f, rb, float(r), frozenset({"a"}), offsets=True), rel_tol=rel_tol)
    return res.value


def _tanh_half_parts(rho):
    """(T, 1 - T) with T = tanh(rho / 2), the second without cancellation."""
    one_minus = 2.0 / (math.exp(rho) + 1.0)
    return 1.0 - one_minus, one_minus


def angular_shift_v(theta, rho: float, tau: float):
    """v(theta) = 4 tau arctan(T sin(theta) / (1 - T cos(theta))), T = tanh(rho / 2)."""
    T, omt = _tanh_half_parts(rho)
    theta = np.asarray(theta, dtype=float)
    s2 = np.sin(theta / 2.0) ** 2
    return 4.0 * tau * np.arctan(T * np.sin(theta) / (omt + 2.0 * T * s2))


def angular_shift_v_prime(theta, rho: float, tau: float):
    """v'(theta) = 4 tau T (cos(theta) - T) / (1 - 2 T cos(theta) + T^2)."""
    T, omt = _tanh_half_parts(rho)
    theta = np.asarray(theta, dtype=float)
    s2 = np.sin(theta / 2.0) ** 2
    return 4.0 * tau * T * (omt - 2.0 * s2) / (omt * omt + 4.0 * T * s2)


def _theta_breakpoints(rho):
    """Graded partition of [0, pi] resolving the spike of v' near theta = 0."""
    _, omt = _tanh_half_parts(rho)
    pts = []
    w = omt
    while w < 0.5:
        pts.append(w)
        w *= 2.0
    pts.append(2.0 * math.exp(-rho / 2.0))
    return np.unique(np.clip(pts + [0.5, 1.0, 2.0], 0.0, math.pi))


def annulus_area(spec: AnnulusSpec, rel_tol: float = REL_TOL) -> float:
    """Area of both sheets of Y over theta in [0, 2 pi).

    The integrand is even about theta = pi, so the theta integral runs over
    [0, pi] and is doubled; the two sheets contribute equally.
    """
    tau = abs(spec.tau)
    k = stretch(tau)
    rb, rho = spec.rho_bar, spec.rho

    def inner(theta):
        vp = angular_shift_v_prime(theta, rho, tau)[:, None, None]

        def w(r, da, db):
            sh = np.sinh(r)
            sh_up = k * sh * _neck_factor(rb, da)
            bend = vp + 2.0 * tau - 2.0 * tau * np.cosh(r)
            return np.sqrt(sh * sh + sh_up * sh_up + bend * bend)

        spec_r = SingularIntegral(w, rb, rho, frozenset({"a"}), offsets=True)
        return integrate(spec_r, rel_tol=rel_tol * 0.1, max_evals=50_000_000).value

    def outer(theta):
        flat = theta.ravel()
        return inner(flat).reshape(theta.shape)

    res = integrate(SingularIntegral(outer, 0.0, math.pi), rel_tol=rel_tol,
                    breakpoints=_theta_breakpoints(rho))
    return 2.0 * 2.0 * res.value


def boundary_gap(spec: AnnulusSpec) -> float:
    """Vertical distance 2 k U(rho) between the two boundary circles."""
    return 2.0 * stretch(spec.tau) * catenoid_profile_U(spec.rho, spec)


def gap_limit(tau: float) -> float:
    return stretch(tau) * math.pi


@dataclass(frozen=True)
class DouglasResult:
    holds: bool
    margin: float
    area_disk: float
    area_annulus: float
    gap: float

    def row(self, spec: AnnulusSpec) -> dict:
        return {"rho_bar": spec.rho_bar, "rho": spec.rho, "tau": spec.tau,
                "area_disk": self.area_disk, "area_annulus": self.area_annulus,
                "margin": self.margin, "gap": self.gap}


def douglas_check(spec: AnnulusSpec, rel_tol: float = REL_TOL) -> DouglasResult:
    """Compare 2 Area(D) with Area(Y); ``margin`` is their difference."""
    ad = disk_area(spec.rho, spec.tau)
    ay = annulus_area(spec, rel_tol)
    margin = 2.0 * ad - ay
    return DouglasResult(bool(margin > 0), margin, ad, ay, boundary_gap(spec))


def douglas_sweep(tau: float, rho_bars, ratio: float = 1.25, rel_tol: float = REL_TOL, workers: int = 1):
    """One DouglasResult row per neck parameter with rho = ratio * rho_bar."""
    if not ratio > 1:
        raise BadParameter("ratio must exceed 1")
    specs = [AnnulusSpec(float(rb), ratio * float(rb), tau) for rb in rho_bars]

    def run(s):
        return douglas_check(s, rel_tol).row(s)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, specs))
    return [run(s) for s in specs]


def douglas_threshold(tau: float, ratio: float = 1.25, lo: float = 0.1, hi: float = 4.0,
                      tol: float = 1e-6) -> float:
    """Neck parameter where the Douglas margin changes sign, by bracketing."""

    def margin(rb):
        return douglas_check(AnnulusSpec(rb, ratio * rb, tau)).margin

    return find_root(margin, lo, hi, tol)


def lemma42_audit(spec: AnnulusSpec, n_theta: int = 10_000) -> dict:
    """Grid check of the integral bound and the v' bounds used in the area estimate.

    Item 1: 2 pi int sqrt(1 + U_r^2) sinh r dr < 2 pi sqrt(cosh^2 rho - cosh^2 rho_bar).
    Item 2: -2 tau < v' <= v'(0) = 2 tau e^rho - 2 tau, with equality only at theta = 0.
    Item 3: -2 tau < v' < 0 for 2 e^{-rho/2} < theta < 2 pi - 2 e^{-rho/2}.
    """
    tau = spec.tau
    if not tau > 0:
        raise BadParameter("the v' bounds assume tau > 0")
    rb, rho = spec.rho_bar, spec.rho

    def lhs_integrand(r, da, db):
        sh = np.sinh(r)
        return sh * np.sqrt(1.0 + _neck_factor(rb, da) ** 2)

    lhs = 2.0 * math.pi * integrate(
        SingularIntegral(lhs_integrand, rb, rho, frozenset({"a"}), offsets=True), rel_tol=1e-12).value
    rhs = 2.0 * math.pi * math.sqrt((math.cosh(rho) - math.cosh(rb)) * (math.cosh(rho) + math.cosh(rb)))

    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    vp = angular_shift_v_prime(theta, rho, tau)
    top = 2.0 * tau * math.expm1(rho)
    lower_margin = vp + 2.0 * tau
    upper_gap = top - vp
    off0 = theta > 0
    i_low = int(np.argmin(lower_margin))
    i_up = int(np.argmin(np.where(off0, upper_gap, np.inf)))
    item2 = bool(np.all(lower_margin > 0) and np.all(upper_gap[off0] > 0)
                 and abs(upper_gap[0]) <= 1e-12 * max(1.0, top))

    edge = 2.0 * math.exp(-rho / 2.0)
    inside = (theta > edge) & (theta < 2.0 * math.pi - edge)
    neg_margin = np.where(inside, -vp, np.inf)
    i3 = int(np.argmin(neg_margin))
    item3 = bool(np.all(vp[inside] < 0) and np.all(lower_margin[inside] > 0))

    return {
        "rho_bar": rb, "rho": rho, "tau": tau, "n_theta": n_theta,
        "item1": {"holds": bool(lhs < rhs), "lhs": lhs, "rhs": rhs, "margin": rhs - lhs},
        "item2": {"holds": item2, "v_prime_at_0": float(vp[0]), "bound": top,
                  "worst_lower_margin": float(lower_margin[i_low]), "at_lower": float(theta[i_low]),
                  "worst_upper_margin": float(upper_gap[i_up]), "at_upper": float(theta[i_up])},
        "item3": {"holds": item3, "edge": edge, "worst_margin": float(neg_margin[i3]),
                  "at": float(theta[i3])},
        "holds": bool(lhs < rhs and item2 and item3),
    }
