"""Numerical kernel: adaptive quadrature for inverse-square-root endpoint
singularities, a bracketing root finder and a finite-difference oracle.

The quadrature is a globally adaptive 7/15-point Gauss-Kronrod scheme that
is vectorized over subintervals, so one integrand call evaluates a whole
refinement sweep. Endpoint singularities of order 1/2 are removed by a
change of variables before any refinement happens:

* both ends singular:   t = a + (b - a) sin^2(phi),  phi in [0, pi/2]
* only ``a`` singular:  t = a + (b - a) s^2,         s in [0, 1]
* only ``b`` singular:  t = b - (b - a) s^2,         s in [0, 1]
* ``b = inf``:          t = a + tan(psi)  (or a + tan^2(psi) if ``a`` is singular)

Integrands that lose accuracy near an endpoint can ask for the distances to
both ends computed inside the substitution (``offsets=True``); they are then
called as ``f(t, t - a, b - t)`` with the offsets free of cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, FrozenSet

import numpy as np
from scipy import fft, optimize

from .errors import BadParameter, NoBracket, NoConvergence, NonFinite

EVALUATION_CAP = 1_000_000
ABS_FLOOR = 1e-12

# 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[1:7:2] = _WG[:3]
_GAUSS[7] = _WG[3]
_GAUSS[9:14:2] = _WG[2::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class SingularIntegral:
    integrand: Callable
    a: float
    b: float
    singular_at: FrozenSet[str] = field(default_factory=frozenset)
    singularity_order: float = 0.5
    offsets: bool = False

    def __post_init__(self):
        object.__setattr__(self, "singular_at", frozenset(self.singular_at))
        if not self.singular_at <= {"a", "b"}:
            raise BadParameter(f"singular_at must be a subset of {{'a', 'b'}}, got {set(self.singular_at)}")
        if self.singularity_order != 0.5:
            raise BadParameter("only inverse-square-root endpoint singularities are supported")
        if not (math.isfinite(self.a) and self.a < self.b):
            raise BadParameter(f"need finite a < b, got a={self.a!r}, b={self.b!r}")
        if math.isinf(self.b) and "b" in self.singular_at:
            raise BadParameter("an infinite endpoint cannot carry a singularity")


@dataclass(frozen=True)
class QuadratureResult:
    value: float | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int

    def __float__(self) -> float:
        return float(self.value)


def _substitution(spec: SingularIntegral):
    """Return (lo, hi, g) where g(u) = (t, da, db, dt/du)."""
    a, b = spec.a, spec.b
    sing = spec.singular_at
    if math.isinf(b):
        if "a" in sing:
            def g(u):
                tn = np.tan(u)
                da = tn * tn
                return a + da, da, np.full_like(u, np.inf), 2.0 * tn / np.cos(u) ** 2
        else:
            def g(u):
                da = np.tan(u)
                return a + da, da, np.full_like(u, np.inf), 1.0 / np.cos(u) ** 2
        return 0.0, math.pi / 2.0, g
    w = b - a
    if sing == {"a", "b"}:
        def g(u):
            s2 = np.sin(u) ** 2
            c2 = np.cos(u) ** 2
            return a + w * s2, w * s2, w * c2, w * np.sin(2.0 * u)
        return 0.0, math.pi / 2.0, g
    if sing == {"a"}:
        def g(u):
            da = w * u * u
            # 1 - s^2 written as a product keeps precision for s near 1
            return a + da, da, w * (1.0 - u) * (1.0 + u), 2.0 * w * u
        return 0.0, 1.0, g
    if sing == {"b"}:
        def g(u):
            db = w * u * u
            return b - db, w * (1.0 - u) * (1.0 + u), db, 2.0 * w * u
        return 0.0, 1.0, g

    def g(u):
        return u, u - a, b - u, np.ones_like(u)
    return a, b, g


def _gk_batch(func, lo: np.ndarray, hi: np.ndarray):
    """Apply the 15-point rule on every interval [lo_i, hi_i] at once.

    ``func`` maps an (n, 15) array of abscissae to an array of shape
    (k, n, 15) for a k-component integrand. Returns (value, error) with
    shapes (k, n).
    """
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    u = center[:, None] + half[:, None] * _NODES[None, :]
    fv = func(u)
    if not np.all(np.isfinite(fv)):
        raise NonFinite("integrand returned a non-finite value inside the interval")
    hk = fv @ _KRONROD
    hg = fv @ _GAUSS
    kron = hk * half
    gauss = hg * half
    mean = 0.5 * hk
    resabs = (np.abs(fv) @ _KRONROD) * np.abs(half)
    resasc = (np.abs(fv - mean[..., None]) @ _KRONROD) * np.abs(half)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc != 0) & (err != 0),
            resasc * np.minimum(1.0, (200.0 * err / np.where(resasc == 0, 1.0, resasc)) ** 1.5),
            err,
        )
    scaled = np.where(resabs > _TINY / (50.0 * _EPS), np.maximum(50.0 * _EPS * resabs, scaled), scaled)
    return kron, scaled


def integrate(
    spec: SingularIntegral,
    rel_tol: float = 1e-10,
    abs_tol: float = ABS_FLOOR,
    max_evals: int = EVALUATION_CAP,
    initial_intervals: int = 1,
    breakpoints=None,
) -> QuadratureResult:
    """Integrate ``spec.integrand`` over [a, b] to the requested tolerance.

    The integrand is called with numpy arrays of abscissae (and the two
    endpoint offsets when ``spec.offsets`` is set). It may return either an
    array of the same shape or an array with one extra leading axis for a
    vector-valued integrand; each component is then converged separately.
    ``breakpoints`` are given in the substituted variable and seed the
    initial partition.
    """
    if not (1e-14 < rel_tol < 1e-2):
        raise BadParameter(f"rel_tol={rel_tol!r} must lie in (1e-14, 1e-2)")
    lo0, hi0, sub = _substitution(spec)
    f = spec.integrand

    shape = {"vector": False}

    def func(u):
        t, da, db, jac = sub(u)
        vals = f(t, da, db) if spec.offsets else f(t)
        vals = np.asarray(vals, dtype=float)
        if vals.ndim == u.ndim:
            vals = vals[None, ...]
        else:
            shape["vector"] = True
        return vals * jac

    if breakpoints is not None and len(breakpoints):
        edges = np.unique(np.concatenate([[lo0, hi0], np.asarray(breakpoints, dtype=float)]))
        edges = edges[(edges >= lo0) & (edges <= hi0)]
    else:
        edges = np.linspace(lo0, hi0, max(1, int(initial_intervals)) + 1)

    # accepted intervals are frozen; active ones are refined
    done_lo, done_val, done_err = [], [], []
    act_lo, act_hi = edges[:-1], edges[1:]
    evals = 0
    total_len = hi0 - lo0
    while True:
        val, err = _gk_batch(func, act_lo, act_hi)
        evals += 15 * act_lo.size
        all_val = np.concatenate(done_val + [val], axis=1) if done_val else val
        all_err = np.concatenate(done_err + [err], axis=1) if done_err else err
        total = all_val.sum(axis=1)
        tol = np.maximum(rel_tol * np.abs(total), abs_tol)
        if np.all(all_err.sum(axis=1) <= tol):
            done_lo.append(act_lo)
            done_val.append(val)
            done_err.append(err)
            break
        share = tol[:, None] * (act_hi - act_lo)[None, :] / total_len
        split = np.any(err > share, axis=0)
        if not split.any():
            # every interval is individually fine but accepted ones were
            # judged against an older total; refine the worst ones
            split = np.any(err >= np.max(err, axis=1, keepdims=True) * 0.5, axis=0)
        keep = ~split
        done_lo.append(act_lo[keep])
        done_val.append(val[:, keep])
        done_err.append(err[:, keep])
        mid = 0.5 * (act_lo[split] + act_hi[split])
        if evals + 30 * mid.size > max_evals:
            raise NoConvergence(
                f"evaluation cap {max_evals} reached; error {all_err.sum(axis=1).max():.3g} "
                f"exceeds tolerance {tol.min():.3g}"
            )
        if np.any(mid <= act_lo[split]) or np.any(mid >= act_hi[split]):
            raise NoConvergence("subinterval width underflow during refinement")
        act_lo = np.concatenate([act_lo[split], mid])
        act_hi = np.concatenate([mid, act_hi[split]])

    lo_all = np.concatenate(done_lo)
    val_all = np.concatenate(done_val, axis=1)
    err_all = np.concatenate(done_err, axis=1)
    order = np.argsort(lo_all, kind="stable")
    # compensated sum in a fixed order keeps results partition independent
    value = np.array([math.fsum(row[order]) for row in val_all])
    error = err_all.sum(axis=1)
    if not shape["vector"]:
        return QuadratureResult(float(value[0]), float(error[0]), evals)
    return QuadratureResult(value, error, evals)


def quad(f, a, b, singular=(), rel_tol=1e-10, offsets=False, **kwargs) -> float:
    """Shorthand for ``integrate(SingularIntegral(...)).value``."""
    spec = SingularIntegral(f, float(a), float(b), frozenset(singular), offsets=offsets)
    return integrate(spec, rel_tol=rel_tol, **kwargs).value


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-14) -> float:
    """Root of ``f`` inside a sign-changing bracket [lo, hi].

    Brent's method does the work; plain bisection takes over if it fails
    to meet the bracket-width target.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)) or flo * fhi > 0:
        raise NoBracket(f"f({lo!r})={flo!r} and f({hi!r})={fhi!r} do not bracket a root")
    try:
        return float(optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * _EPS, maxiter=200))
    except (RuntimeError, ValueError):
        pass
    a, b, fa = float(lo), float(hi), flo
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def fd_derivatives(u: Callable[[float, float], float], p, h: float = 1e-4):
    """Central-difference (u_x, u_y, u_xx, u_xy, u_yy) at ``p``, O(h^2) accurate."""
    x, y = p
    u0 = u(x, y)
    uxp, uxm = u(x + h, y), u(x - h, y)
    uyp, uym = u(x, y + h), u(x, y - h)
    upp, upm = u(x + h, y + h), u(x + h, y - h)
    ump, umm = u(x - h, y + h), u(x - h, y - h)
    ux = (uxp - uxm) / (2 * h)
    uy = (uyp - uym) / (2 * h)
    uxx = (uxp - 2 * u0 + uxm) / (h * h)
    uyy = (uyp - 2 * u0 + uym) / (h * h)
    uxy = (upp - upm - ump + umm) / (4 * h * h)
    return ux, uy, uxx, uxy, uyy


def chebyshev_coefficients(f, deg: int, lo: float, hi: float) -> np.ndarray:
    """Coefficients of the degree-``deg`` interpolant at first-kind Chebyshev points."""
    n = deg + 1
    theta = np.pi * (np.arange(n) + 0.5) / n
    x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos(theta)
    coef = fft.dct(np.asarray(f(x), dtype=float), type=2) / n
    coef[0] *= 0.5
    return coef


class ChebyshevAntiderivative:
    """Antiderivative of a smooth integrand on [lo, hi] as a Chebyshev series.

    The degree is doubled until the trailing coefficients of the integrand
    reach the rounding plateau. The result is anchored so that
    ``self(anchor) == 0``.
    """

    def __init__(self, f, lo: float, hi: float, anchor: float | None = None,
                 tol: float = 1e-15, min_deg: int = 32, max_deg: int = 1 << 15):
        anchor = lo if anchor is None else anchor
        deg = min_deg
        previous = np.inf
        while True:
            coef = chebyshev_coefficients(f, deg, lo, hi)
            if not np.all(np.isfinite(coef)):
                raise NonFinite("integrand is not finite on the interpolation grid")
            scale = max(np.abs(coef).max(), np.finfo(float).tiny)
            tail = np.abs(coef[-8:]).max() / scale
            self.converged = tail <= tol or (tail < 1e-13 and tail > 0.25 * previous)
            if self.converged or deg >= max_deg:
                break
            previous = tail
            deg *= 2
        self.degree = deg
        self.tail = tail
        self.lo, self.hi = lo, hi
        keep = np.nonzero(np.abs(coef) > 0.5 * tol * scale)[0]
        cut = int(keep.max()) + 1 if keep.size else 1
        self.integrand = np.polynomial.Chebyshev(coef[:cut], domain=[lo, hi])
        prim = self.integrand.integ()
        self.series = prim - prim(anchor)

    def __call__(self, x):
        return self.series(x)
