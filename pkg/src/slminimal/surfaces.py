"""Invariant minimal surfaces of SL2~(R) in the half-space model.

Five families are provided, each a vertical graph (or a pair of graphs
glued along a vertical tangency):

``SlabBigraph(d)``
    u = +-k arcsin(d y) on 0 < y < 1/d, with k = sqrt(1 + 4 tau^2).
``Tilted(d, l)``
    v = l x +- int_0^y sqrt(1 + (l t - 2 tau)^2) / sqrt(d^2 - t^2) dt on 0 < y < d.
``Fan(c)``
    u(s) = 2 tau arctan(s) +- int_{c0}^s F(t) dt with s = x / y and
    F(t) = sqrt(1 + k^2 t^2) / ((t^2 + 1) sqrt(c (t^2 + 1) - 1)).
    The lower limit c0 is 0 for c > 1, 1 for c = 1 and sqrt((1 - c)/c) for c < 1.
``Catenoid(c)``
    u = +-h(r) + 4 tau arctan(x / (y + 1)), r = ((y-1)^2 + x^2)/(x^2 + (y+1)^2),
    h(r) = int_{r0}^r sqrt(1 + 4 t tau^2) / sqrt(t g(t)) dt with g(t) = -1 + c t - t^2,
    which solves the minimal-graph equation for every tau. The older profile
    g(t) = -3 + t^2 + c t - 4 t log t is kept as ``profile="transcribed"`` for
    comparison; it does not give minimal graphs.
``UmbrellaLimit(lam)``
    u = 4 tau arctan(x / (y + lam)).

Values of the quadrature-backed families come from Chebyshev antiderivatives
of smooth reparametrized integrands, built eagerly at construction. First
and second derivatives are always closed-form integrand evaluations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.stats import qmc

from .errors import BadParameter, NearSingularWarning, NoBracket
from .numerics import ChebyshevAntiderivative, SingularIntegral, find_root, integrate

NEAR_SINGULAR = 1e-9
QUAD_TOL = 1e-13


def stretch(tau: float) -> float:
    """k = sqrt(1 + 4 tau^2), the factor that scales every critical height."""
    return math.sqrt(1.0 + 4.0 * tau * tau)


def critical_height(tau: float) -> float:
    """The tallness threshold k pi."""
    return stretch(tau) * math.pi


# ---------------------------------------------------------------------------
# family parameters


@dataclass(frozen=True)
class SlabBigraph:
    d: float

    def validate(self):
        if not (math.isfinite(self.d) and self.d > 0):
            raise BadParameter(f"SlabBigraph needs d > 0, got {self.d!r}")


@dataclass(frozen=True)
class Tilted:
    d: float
    l: float = 0.0

    def validate(self):
        if not (math.isfinite(self.d) and self.d > 0 and math.isfinite(self.l)):
            raise BadParameter(f"Tilted needs d > 0 and finite l, got d={self.d!r}, l={self.l!r}")


@dataclass(frozen=True)
class Fan:
    c: float

    def validate(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise BadParameter(f"Fan needs c > 0, got {self.c!r}")


CATENOID_PROFILES = ("minimal", "transcribed")


@dataclass(frozen=True)
class Catenoid:
    c: float
    profile: str = "minimal"

    def validate(self):
        if not math.isfinite(self.c):
            raise BadParameter(f"Catenoid needs finite c, got {self.c!r}")
        if self.profile not in CATENOID_PROFILES:
            raise BadParameter(f"unknown catenoid profile {self.profile!r}")
        catenoid_root(self.c, self.profile)


@dataclass(frozen=True)
class UmbrellaLimit:
    lam: float = 0.0

    def validate(self):
        if not self.lam >= 0:
            raise BadParameter(f"UmbrellaLimit needs lam >= 0, got {self.lam!r}")


Family = Union[SlabBigraph, Tilted, Fan, Catenoid, UmbrellaLimit]

FAMILY_NAMES = {
    "slab-bigraph": SlabBigraph,
    "tilted": Tilted,
    "fan": Fan,
    "catenoid": Catenoid,
    "umbrella": UmbrellaLimit,
}


def family_name(family: Family) -> str:
    for name, cls in FAMILY_NAMES.items():
        if isinstance(family, cls):
            return name
    raise BadParameter(f"unknown family {family!r}")


@dataclass(frozen=True)
class InvariantSurface:
    family: Family
    sign: int = 1
    tau: float = 0.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise BadParameter(f"sign must be +1 or -1, got {self.sign!r}")
        if not math.isfinite(self.tau):
            raise BadParameter("tau must be finite")
        self.family.validate()

    def describe(self) -> dict:
        params = {k: v for k, v in self.family.__dict__.items()}
        return {"family": family_name(self.family), "params": params,
                "sign": "+" if self.sign > 0 else "-", "tau": self.tau}


# ---------------------------------------------------------------------------
# graph functions


@dataclass(frozen=True)
class GraphFunction:
    """A scalar field u(x, y) with analytic first and second derivatives.

    ``eval``, ``grad`` and ``hess`` accept scalars or numpy arrays;
    ``grad`` returns (u_x, u_y) and ``hess`` returns (u_xx, u_xy, u_yy).
    """

    eval: Callable
    grad: Callable
    hess: Callable
    domain: Callable = field(default=lambda x, y: np.asarray(y) > 0)
    name: str = "graph"

    def __call__(self, x, y):
        return self.eval(x, y)


def polynomial_graph(coeffs: dict, name: str = "polynomial") -> GraphFunction:
    """Graph of sum c_ij x^i y^j from a {(i, j): c_ij} mapping."""

    def term(x, y, i, j):
        return (x ** i if i > 0 else 1.0) * (y ** j if j > 0 else 1.0)

    def ev(x, y):
        return sum(c * term(x, y, i, j) for (i, j), c in coeffs.items()) + 0.0 * np.asarray(x)

    def gr(x, y):
        ux = sum(c * i * term(x, y, i - 1, j) for (i, j), c in coeffs.items() if i > 0)
        uy = sum(c * j * term(x, y, i, j - 1) for (i, j), c in coeffs.items() if j > 0)
        z = 0.0 * np.asarray(x, dtype=float)
        return ux + z, uy + z

    def he(x, y):
        z = 0.0 * np.asarray(x, dtype=float)
        uxx = sum(c * i * (i - 1) * term(x, y, i - 2, j) for (i, j), c in coeffs.items() if i > 1)
        uxy = sum(c * i * j * term(x, y, i - 1, j - 1) for (i, j), c in coeffs.items() if i > 0 and j > 0)
        uyy = sum(c * j * (j - 1) * term(x, y, i, j - 2) for (i, j), c in coeffs.items() if j > 1)
        return uxx + z, uxy + z, uyy + z

    return GraphFunction(ev, gr, he, name=name)


def _warn_near(dist, what: str):
    if np.any(np.asarray(dist) < NEAR_SINGULAR):
        warnings.warn(f"evaluation within {NEAR_SINGULAR:g} of {what}", NearSingularWarning, stacklevel=3)


def _s_derivatives(y, s, d1, d2):
    """Chain rule for u(x, y) = f(s), s = x / y, given f'(s) and f''(s)."""
    ux = d1 / y
    uy = -s * d1 / y
    y2 = y * y
    uxx = d2 / y2
    uxy = -(s * d2 + d1) / y2
    uyy = (2.0 * s * d1 + s * s * d2) / y2
    return (ux, uy), (uxx, uxy, uyy)


# -- slab ---------------------------------------------------------------------


def _slab_graph(fam: SlabBigraph, sign: int, tau: float) -> GraphFunction:
    k, d = stretch(tau), fam.d

    def ev(x, y):
        _warn_near(1.0 - d * np.asarray(y), "the vertical tangency y = 1/d")
        return sign * k * np.arcsin(d * y) + 0.0 * np.asarray(x)

    def gr(x, y):
        q = (1.0 - d * y) * (1.0 + d * y)
        return 0.0 * np.asarray(x, dtype=float) + 0.0 * y, sign * k * d / np.sqrt(q) + 0.0 * np.asarray(x)

    def he(x, y):
        q = (1.0 - d * y) * (1.0 + d * y)
        z = 0.0 * np.asarray(x, dtype=float) + 0.0 * y
        return z, z, sign * k * d ** 3 * y / q ** 1.5 + z

    return GraphFunction(ev, gr, he, lambda x, y: (np.asarray(y) > 0) & (np.asarray(y) < 1.0 / d),
                         name=f"slab-bigraph(d={d:g})")


# -- tilted -------------------------------------------------------------------


class _TiltedProfile:
    """G(phi) = int_0^phi sqrt(1 + (l d sin psi - 2 tau)^2) dpsi on [0, pi].

    With y = d sin(phi) the upper sheet is v = l x + G(phi), phi in [0, pi/2],
    and the glued bigraph continues smoothly for phi in [pi/2, pi].
    """

    def __init__(self, d, l, tau):
        self.d, self.l, self.tau = d, l, tau
        self.cheb = ChebyshevAntiderivative(self.integrand, 0.0, math.pi, 0.0)
        self.half = float(self.cheb(math.pi / 2.0))

    def integrand(self, phi):
        p = self.l * self.d * np.sin(phi) - 2.0 * self.tau
        return np.sqrt(1.0 + p * p)

    def phi(self, y):
        y = np.asarray(y, dtype=float)
        return np.arctan2(y, np.sqrt((self.d - y) * (self.d + y)))

    def value(self, y, direct=False):
        phi = self.phi(y)
        if direct:
            return _direct_antiderivative(self.integrand, 0.0, phi)
        return self.cheb(phi)


def _direct_antiderivative(f, anchor, points):
    """Evaluate int_anchor^p f by adaptive quadrature at every point."""
    pts = np.asarray(points, dtype=float)
    out = np.empty(pts.shape)
    for idx, p in np.ndenumerate(pts):
        if p == anchor:
            out[idx] = 0.0
            continue
        lo, hi, sgn = (anchor, p, 1.0) if p > anchor else (p, anchor, -1.0)
        out[idx] = sgn * integrate(SingularIntegral(f, lo, hi), rel_tol=QUAD_TOL).value
    return out if pts.ndim else float(out)


@lru_cache(maxsize=64)
def _tilted_profile(d, l, tau):
    return _TiltedProfile(d, l, tau)


def _tilted_graph(fam: Tilted, sign: int, tau: float, direct=False) -> GraphFunction:
    d, l = fam.d, fam.l
    prof = _tilted_profile(d, l, tau)

    def vprime(y):
        p = l * y - 2.0 * tau
        w = np.sqrt(1.0 + p * p)
        q = (d - y) * (d + y)
        return p, w, q

    def ev(x, y):
        _warn_near(d - np.asarray(y), "the vertical tangency y = d")
        return l * np.asarray(x) + sign * prof.value(y, direct)

    def gr(x, y):
        p, w, q = vprime(y)
        return l + 0.0 * np.asarray(x, dtype=float) + 0.0 * y, sign * w / np.sqrt(q) + 0.0 * np.asarray(x)

    def he(x, y):
        p, w, q = vprime(y)
        z = 0.0 * np.asarray(x, dtype=float) + 0.0 * y
        vyy = l * p / (w * np.sqrt(q)) + w * y / q ** 1.5
        return z, z, sign * vyy + z

    return GraphFunction(ev, gr, he, lambda x, y: (np.asarray(y) > 0) & (np.asarray(y) < d),
                         name=f"tilted(d={d:g}, l={l:g})")


def tilted_height(d: float, l: float, tau: float) -> float:
    """v_d^+(d): half the vertical gap between the two boundary lines."""
    Tilted(d, l).validate()

    def f(t, da, db):
        p = l * t - 2.0 * tau
        return np.sqrt(1.0 + p * p) / np.sqrt(db * (d + t))

    spec = SingularIntegral(f, 0.0, d, frozenset({"b"}), offsets=True)
    return integrate(spec, rel_tol=QUAD_TOL).value


# -- fan ----------------------------------------------------------------------


class _FanProfile:
    """Antiderivative of F in a variable where the integrand is smooth.

    c > 1: s = tan(psi), P(psi) = int_0^psi sqrt(cos^2 + k^2 sin^2)/sqrt(c - cos^2).
    c = 1: s = tan(psi), int_1^s F = log tan(psi/2) - log tan(pi/8) + R(psi) - R(pi/4)
           with the smooth remainder R' = (k^2-1) sin / (sqrt(1 + (k^2-1) sin^2) + 1).
    c < 1: tan(chi) = sqrt(c (1 + s^2) - 1), P(chi) = int_0^chi sqrt(k^2 - (k^2-1) c cos^2)
           / sqrt(1 - c cos^2); the glued surface uses chi in (-pi/2, pi/2).
    """

    def __init__(self, c, tau):
        self.c, self.tau = c, tau
        self.k2 = 1.0 + 4.0 * tau * tau
        if c > 1:
            self.cheb = ChebyshevAntiderivative(self._f_gt, -math.pi / 2, math.pi / 2, 0.0)
            self.half = float(self.cheb(math.pi / 2))
        elif c == 1:
            self.cheb = ChebyshevAntiderivative(self._f_eq, 0.0, math.pi / 2, math.pi / 4)
            self.half = float(self.cheb(math.pi / 2)) - math.log(math.tan(math.pi / 8))
        else:
            self.s0 = math.sqrt((1.0 - c) / c)
            self.cheb = ChebyshevAntiderivative(self._f_lt, -math.pi / 2, math.pi / 2, 0.0)
            self.half = float(self.cheb(math.pi / 2))

    def _f_gt(self, psi):
        c2 = np.cos(psi) ** 2
        return np.sqrt(c2 + self.k2 * (1.0 - c2)) / np.sqrt(self.c - c2)

    def _f_eq(self, psi):
        s2 = np.sin(psi) ** 2
        return (self.k2 - 1.0) * np.sin(psi) / (np.sqrt(1.0 + (self.k2 - 1.0) * s2) + 1.0)

    def _f_lt(self, chi):
        cc = self.c * np.cos(chi) ** 2
        return np.sqrt(self.k2 - (self.k2 - 1.0) * cc) / np.sqrt(1.0 - cc)

    def gap_sq(self, s):
        """c (s^2 + 1) - 1 without cancellation near the endpoint of I(c)."""
        if self.c < 1:
            return self.c * (s - self.s0) * (s + self.s0)
        return self.c * (s * s + 1.0) - 1.0

    def F(self, s):
        return np.sqrt(1.0 + self.k2 * s * s) / ((s * s + 1.0) * np.sqrt(self.gap_sq(s)))

    def dF(self, s):
        q = self.gap_sq(s)
        logd = self.k2 * s / (1.0 + self.k2 * s * s) - 2.0 * s / (s * s + 1.0) - self.c * s / q
        return self.F(s) * logd

    def value(self, s, direct=False):
        """int_{c0}^s F for s in I(c)."""
        s = np.asarray(s, dtype=float)
        if self.c > 1:
            var = np.arctan(s)
            f, anchor, extra = self._f_gt, 0.0, 0.0
        elif self.c == 1:
            var = np.arctan(s)
            f, anchor = self._f_eq, math.pi / 4
            extra = np.log(s / (1.0 + np.sqrt(1.0 + s * s))) - math.log(math.tan(math.pi / 8))
        else:
            var = np.arctan(np.sqrt(np.maximum(self.gap_sq(s), 0.0)))
            f, anchor, extra = self._f_lt, 0.0, 0.0
        body = _direct_antiderivative(f, anchor, var) if direct else self.cheb(var)
        return body + extra


@lru_cache(maxsize=64)
def _fan_profile(c, tau):
    return _FanProfile(c, tau)


def fan_domain_lower(c: float) -> float:
    """Left end of I(c): -inf, 0 or sqrt((1 - c)/c)."""
    if c > 1:
        return -math.inf
    if c == 1:
        return 0.0
    return math.sqrt((1.0 - c) / c)


def _fan_graph(fam: Fan, sign: int, tau: float, direct=False) -> GraphFunction:
    c = fam.c
    prof = _fan_profile(c, tau)
    s_lo = fan_domain_lower(c)

    def s_of(x, y):
        s = np.asarray(x, dtype=float) / np.asarray(y, dtype=float)
        if math.isfinite(s_lo):
            _warn_near(s - s_lo, "the left end of I(c)")
        return s

    def ev(x, y):
        s = s_of(x, y)
        return 2.0 * tau * np.arctan(s) + sign * prof.value(s, direct)

    def derivs(x, y):
        y = np.asarray(y, dtype=float)
        s = np.asarray(x, dtype=float) / y
        d1 = 2.0 * tau / (1.0 + s * s) + sign * prof.F(s)
        d2 = -4.0 * tau * s / (1.0 + s * s) ** 2 + sign * prof.dF(s)
        return _s_derivatives(y, s, d1, d2)

    def dom(x, y):
        y = np.asarray(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (y > 0) & (np.asarray(x) / np.where(y > 0, y, 1.0) > s_lo)

    return GraphFunction(ev, lambda x, y: derivs(x, y)[0], lambda x, y: derivs(x, y)[1], dom,
                         name=f"fan(c={c:g})")


def fan_total_height(c: float, tau: float) -> float:
    """u_c^+(+inf) - u_c^-(+inf) for 0 < c < 1: height of the tall rectangle."""
    if not (0 < c < 1):
        raise BadParameter(f"fan_total_height needs 0 < c < 1, got {c!r}")
    k2 = 1.0 + 4.0 * tau * tau
    s0 = math.sqrt((1.0 - c) / c)

    def f(t, da, db):
        return np.sqrt(1.0 + k2 * t * t) / ((t * t + 1.0) * np.sqrt(c * da * (t + s0)))

    spec = SingularIntegral(f, s0, math.inf, frozenset({"a"}), offsets=True)
    return 2.0 * integrate(spec, rel_tol=QUAD_TOL).value


def fan_limits(c: float, tau: float):
    """(u_c^+(+inf), u_c^+(-inf) or None) for the upper sheet."""
    prof = _fan_profile(c, tau)
    plus = tau * math.pi + prof.half
    minus = -tau * math.pi - prof.half if c > 1 else None
    return plus, minus


# -- catenoid -----------------------------------------------------------------


def catenoid_profile_g(t, c, profile: str = "minimal"):
    """The cubic-free part g of the catenoid integrand sqrt(1 + 4 t tau^2)/sqrt(t g(t))."""
    if profile == "minimal":
        return -1.0 + c * t - t * t
    return -3.0 + t * t + c * t - 4.0 * t * np.log(t)


def catenoid_root(c: float, profile: str = "minimal") -> float:
    """r0(c): the zero of g in (0, 1) where the catenoid has its neck.

    For the minimal profile g = (t - r0)(r1 - t) with r0 r1 = 1, so
    r0 = 2 / (c + sqrt(c^2 - 4)) whenever c > 2.
    """
    if profile not in CATENOID_PROFILES:
        raise BadParameter(f"unknown catenoid profile {profile!r}")
    if profile == "minimal":
        if not c > 2:
            raise NoBracket(f"-1 + c t - t^2 has no sign change on (0, 1) for c={c!r}")
        return 2.0 / (c + math.sqrt((c - 2.0) * (c + 2.0)))
    lo, hi = 1e-300, 1.0
    f = lambda t: float(catenoid_profile_g(t, c, profile))
    if not (f(lo) < 0 < f(hi)):
        raise NoBracket(f"-3 + t^2 + c t - 4 t log t has no sign change on (0, 1) for c={c!r}")
    return find_root(f, lo, hi, tol=1e-16)


def _log1p_ratio(x):
    """log1p(x) / x with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - 0.5 * x, np.log1p(safe) / safe)


class _CatenoidProfile:
    """h in the variable phi with r = r0 + (1 - r0) sin^2(phi), phi in [-pi/2, pi/2].

    Writing g(r) = (r - r0) q(r) the integrand becomes
    2 sqrt(1 - r0) cos(phi) sqrt(1 + 4 r tau^2) / sqrt(r q(r)), which is smooth.
    """

    def __init__(self, c, tau, profile="minimal"):
        self.c, self.tau, self.profile = c, tau, profile
        self.r0 = catenoid_root(c, profile)
        self.cheb = ChebyshevAntiderivative(self.integrand, -math.pi / 2, math.pi / 2, 0.0)
        self.neck = float(self.cheb(math.pi / 2))

    def q(self, delta):
        """g(r0 + delta) / delta, accurate for small delta."""
        r0 = self.r0
        if self.profile == "minimal":
            return 1.0 / r0 - r0 - delta
        return (2.0 * r0 + delta + self.c - 4.0 * np.log(r0 + delta)
                - 4.0 * _log1p_ratio(delta / r0))

    def integrand(self, phi):
        r0 = self.r0
        delta = (1.0 - r0) * np.sin(phi) ** 2
        r = r0 + delta
        return (2.0 * math.sqrt(1.0 - r0) * np.cos(phi) * np.sqrt(1.0 + 4.0 * r * self.tau ** 2)
                / np.sqrt(r * self.q(delta)))

    def phi(self, delta, one_minus_r):
        return np.arctan2(np.sqrt(np.maximum(delta, 0.0)), np.sqrt(np.maximum(one_minus_r, 0.0)))

    def h_prime(self, r, delta):
        return np.sqrt(1.0 + 4.0 * r * self.tau ** 2) / np.sqrt(r * delta * self.q(delta))

    def h_second(self, r, delta):
        g = delta * self.q(delta)
        if self.profile == "minimal":
            gp = self.c - 2.0 * r
        else:
            gp = 2.0 * r + self.c - 4.0 * np.log(r) - 4.0
        logd = 2.0 * self.tau ** 2 / (1.0 + 4.0 * r * self.tau ** 2) - (g + r * gp) / (2.0 * r * g)
        return self.h_prime(r, delta) * logd


@lru_cache(maxsize=64)
def _catenoid_profile(c, tau, profile="minimal"):
    return _CatenoidProfile(c, tau, profile)


def disk_radius_coordinates(x, y):
    """r = ((y-1)^2 + x^2)/(x^2 + (y+1)^2) and 1 - r = 4y/(x^2 + (y+1)^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    den = x * x + (y + 1.0) ** 2
    return ((y - 1.0) ** 2 + x * x) / den, 4.0 * y / den, den


def _catenoid_graph(fam: Catenoid, sign: int, tau: float, direct=False) -> GraphFunction:
    prof = _catenoid_profile(fam.c, tau, fam.profile)
    r0 = prof.r0

    def ev(x, y):
        r, omr, den = disk_radius_coordinates(x, y)
        delta = r - r0
        _warn_near(delta, "the catenoid neck r = r0(c)")
        phi = prof.phi(delta, omr)
        h = _direct_antiderivative(prof.integrand, 0.0, phi) if direct else prof.cheb(phi)
        return sign * h + 4.0 * tau * np.arctan(np.asarray(x) / (np.asarray(y) + 1.0))

    def derivs(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r, omr, D = disk_radius_coordinates(x, y)
        delta = r - r0
        h1 = sign * prof.h_prime(r, delta)
        h2 = sign * prof.h_second(r, delta)
        D2, D3 = D * D, D ** 3
        rx = 8.0 * x * y / D2
        ry = 4.0 * (y * y - x * x - 1.0) / D2
        rxx = 8.0 * y / D2 - 32.0 * x * x * y / D3
        rxy = 8.0 * x / D2 - 32.0 * x * y * (y + 1.0) / D3
        ryy = 8.0 * y / D2 - 16.0 * (y * y - x * x - 1.0) * (y + 1.0) / D3
        ax = (y + 1.0) / D
        ay = -x / D
        axx = -2.0 * x * (y + 1.0) / D2
        axy = (x * x - (y + 1.0) ** 2) / D2
        ayy = 2.0 * x * (y + 1.0) / D2
        w = 4.0 * tau
        grad = (h1 * rx + w * ax, h1 * ry + w * ay)
        hess = (h2 * rx * rx + h1 * rxx + w * axx,
                h2 * rx * ry + h1 * rxy + w * axy,
                h2 * ry * ry + h1 * ryy + w * ayy)
        return grad, hess

    def dom(x, y):
        y = np.asarray(y, dtype=float)
        r, _, _ = disk_radius_coordinates(x, np.where(y > 0, y, 1.0))
        return (y > 0) & (r > r0)

    return GraphFunction(ev, lambda x, y: derivs(x, y)[0], lambda x, y: derivs(x, y)[1], dom,
                         name=f"catenoid(c={fam.c:g}, {fam.profile})")


def catenoid_neck_height(c: float, tau: float, profile: str = "minimal") -> float:
    """h_c^+(1): half the vertical gap between the two boundary curves."""
    r0 = catenoid_root(c, profile)
    prof = _CatenoidProfile.__new__(_CatenoidProfile)
    prof.c, prof.tau, prof.r0, prof.profile = c, tau, r0, profile

    def f(t, da, db):
        return np.sqrt(1.0 + 4.0 * t * tau * tau) / np.sqrt(t * da * prof.q(da))

    spec = SingularIntegral(f, r0, 1.0, frozenset({"a"}), offsets=True)
    return integrate(spec, rel_tol=QUAD_TOL).value


# -- umbrella -----------------------------------------------------------------


def umbrella_limit(lam: float, p, tau: float) -> float:
    """4 tau arctan(x / (y + lam)); the limit lam -> inf is the slice t = 0."""
    x, y = p
    if math.isinf(lam):
        return 0.0 * x
    return 4.0 * tau * np.arctan(x / (y + lam))


def _umbrella_graph(fam: UmbrellaLimit, sign: int, tau: float) -> GraphFunction:
    lam = fam.lam
    w = 0.0 if math.isinf(lam) else 4.0 * tau
    shift = 0.0 if math.isinf(lam) else lam

    def ev(x, y):
        return umbrella_limit(lam, (np.asarray(x, dtype=float), np.asarray(y, dtype=float)), tau)

    def parts(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        yl = y + shift
        D = x * x + yl * yl
        return x, yl, D

    def gr(x, y):
        x, yl, D = parts(x, y)
        return w * yl / D, -w * x / D

    def he(x, y):
        x, yl, D = parts(x, y)
        D2 = D * D
        return -2.0 * w * x * yl / D2, w * (x * x - yl * yl) / D2, 2.0 * w * x * yl / D2

    return GraphFunction(ev, gr, he, name=f"umbrella(lam={lam:g})")


# ---------------------------------------------------------------------------


def as_graph(surface: InvariantSurface, direct: bool = False) -> GraphFunction:
    """The graph function of one sheet of ``surface`` in the half-space model.

    With ``direct=True`` quadrature-backed values bypass the Chebyshev cache
    and are recomputed by adaptive quadrature at each point.
    """
    fam, sign, tau = surface.family, surface.sign, surface.tau
    if isinstance(fam, SlabBigraph):
        return _slab_graph(fam, sign, tau)
    if isinstance(fam, Tilted):
        return _tilted_graph(fam, sign, tau, direct)
    if isinstance(fam, Fan):
        return _fan_graph(fam, sign, tau, direct)
    if isinstance(fam, Catenoid):
        return _catenoid_graph(fam, sign, tau, direct)
    if isinstance(fam, UmbrellaLimit):
        return _umbrella_graph(fam, sign, tau)
    raise BadParameter(f"unknown family {fam!r}")


def is_closed_form(family: Family) -> bool:
    return isinstance(family, (SlabBigraph, UmbrellaLimit))


# ---------------------------------------------------------------------------
# sampling, glued bigraphs and asymptotic traces


def _halton(n: int, seed: int = 0) -> np.ndarray:
    sampler = qmc.Halton(d=2, scramble=False)
    if seed:
        sampler.fast_forward(seed)
    pts = sampler.random(n + 1)[1:]
    return pts


def sample_points(surface: InvariantSurface, n: int, margin: float = 0.05, seed: int = 0):
    """Quasi-random interior points of the domain of ``surface``.

    Points are placed in each family's profile variable, keeping a relative
    ``margin`` from singular edges of the domain.
    """
    if n < 1:
        raise BadParameter("need at least one sample")
    u, v = _halton(n, seed).T
    fam = surface.family
    m = margin
    half_pi = math.pi / 2
    if isinstance(fam, SlabBigraph):
        y = np.sin(m + (half_pi - 2 * m) * v) / fam.d
        x = (4.0 * u - 2.0) / fam.d
    elif isinstance(fam, Tilted):
        y = fam.d * np.sin(m + (half_pi - 2 * m) * v)
        x = (4.0 * u - 2.0) * fam.d
    elif isinstance(fam, Fan):
        y = 0.2 + 1.8 * v
        ang_lo = -half_pi + m if fam.c > 1 else m
        ang = ang_lo + (half_pi - m - ang_lo) * u
        if fam.c >= 1:
            s = np.tan(ang)
        else:
            s = np.sqrt((1.0 + np.tan(ang) ** 2) / fam.c - 1.0)
        x = s * y
    elif isinstance(fam, Catenoid):
        r0 = catenoid_root(fam.c, fam.profile)
        phi = m + (half_pi - 2 * m) * v
        r = r0 + (1.0 - r0) * np.sin(phi) ** 2
        w = np.sqrt(r) * np.exp(2j * math.pi * u)
        z = 1j * (1.0 + w) / (1.0 - w)
        x, y = z.real, z.imag
    elif isinstance(fam, UmbrellaLimit):
        x = 4.0 * u - 2.0
        y = 0.1 + 2.9 * v
    else:
        raise BadParameter(f"unknown family {fam!r}")
    return x, y


@dataclass(frozen=True)
class BoundaryTrace:
    """Asymptotic boundary on {y = 0} x R of the glued surface.

    ``pieces`` are polylines of (x, t) rows in half-space boundary
    coordinates; a piece with constant x is a vertical segment. ``gap`` is
    the vertical distance between the two boundary components (inf for a
    single curve) and ``notes`` lists parts at the horizontal ideal boundary.
    """

    pieces: tuple
    gap: float
    description: str
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "gap": self.gap,
            "description": self.description,
            "notes": list(self.notes),
            "pieces": [np.asarray(p).tolist() for p in self.pieces],
        }


def glue_offset(surface: InvariantSurface) -> float:
    """N such that the sheets u^+ - N and u^- + N join continuously.

    The join sits on the vertical tangency of the bigraph. Families whose
    integral starts at the tangency need no shift.
    """
    fam, tau = surface.family, surface.tau
    if isinstance(fam, SlabBigraph):
        return stretch(tau) * math.pi / 2
    if isinstance(fam, Tilted):
        return _tilted_profile(fam.d, fam.l, tau).half
    return 0.0


def asymptotic_boundary(surface: InvariantSurface, resolution: int = 201, extent: float = 10.0) -> BoundaryTrace:
    """Boundary trace of the glued surface, sampled on x in [-extent, extent]."""
    fam, tau = surface.family, surface.tau
    k = stretch(tau)
    xs = np.linspace(-extent, extent, resolution)
    xp = np.linspace(0.0, extent, resolution)

    def line(x, t):
        return np.column_stack([x, t + 0.0 * x])

    if isinstance(fam, SlabBigraph):
        h = k * math.pi / 2
        return BoundaryTrace((line(xs, -h), line(xs, h)), 2 * h,
                             "two horizontal lines t = -h and t = h")
    if isinstance(fam, Tilted):
        h = tilted_height(fam.d, fam.l, tau)
        return BoundaryTrace((line(xs, fam.l * xs - h), line(xs, fam.l * xs + h)), 2 * h,
                             "two parallel lines t = l x - h and t = l x + h")
    if isinstance(fam, Fan):
        prof = _fan_profile(fam.c, tau)
        sgn = surface.sign
        if fam.c > 1:
            up = tau * math.pi + sgn * prof.half
            lo = -up
            return BoundaryTrace(
                (line(-xp[::-1], lo), np.array([[0.0, lo], [0.0, up]]), line(xp, up)),
                abs(up - lo),
                "two half-lines joined by a vertical segment at x = 0",
            )
        if fam.c == 1:
            up = tau * math.pi + sgn * prof.half
            ray_end = -sgn * math.inf
            return BoundaryTrace(
                (line(xp, up), np.array([[0.0, up], [0.0, ray_end]])),
                math.inf,
                "a half-line for x > 0 and a vertical ray at x = 0",
                (f"horizontal geodesic {{x = 0}} at t = {'-' if sgn > 0 else '+'}inf",),
            )
        hgt = fan_total_height(fam.c, tau)
        top, bot = tau * math.pi + hgt / 2, tau * math.pi - hgt / 2
        return BoundaryTrace(
            (line(xp, bot), np.array([[0.0, bot], [0.0, top]]), line(xp, top)),
            hgt,
            "tall rectangle: two half-lines for x > 0 joined by a vertical segment at x = 0",
        )
    if isinstance(fam, Catenoid):
        h = catenoid_neck_height(fam.c, tau, fam.profile)
        base = 4.0 * tau * np.arctan(xs)
        return BoundaryTrace((line(xs, base - h), line(xs, base + h)), 2 * h,
                             "curves t = 4 tau arctan(x) - h and t = 4 tau arctan(x) + h")
    if isinstance(fam, UmbrellaLimit):
        if math.isinf(fam.lam):
            return BoundaryTrace((line(xs, 0.0),), math.inf, "the horizontal line t = 0")
        if fam.lam == 0:
            w = 2.0 * tau * math.pi
            return BoundaryTrace(
                (line(-xp[::-1], -w), np.array([[0.0, -w], [0.0, w]]), line(xp, w)), math.inf,
                "two half-lines joined by a vertical segment of length 4 tau pi")
        return BoundaryTrace((line(xs, 4.0 * tau * np.arctan(xs / fam.lam)),), math.inf,
                             "the curve t = 4 tau arctan(x / lam)")
    raise BadParameter(f"unknown family {fam!r}")
