"""Minimal-graph operators and numerical verification of minimality and isometry.

For a graph t = u(x, y) in a model with conformal factor lam and connection
coefficients (a, b) (see ``geometry.connection_coefficients``) the
generalized gradient is the horizontal field

    Gu = lam^-2 ((u_x + a) d/dx + (u_y + b) d/dy),

and the mean curvature is 2H = div(Gu / sqrt(1 + |Gu|^2)) with the
divergence and norm taken in the hyperbolic metric. In the half-space model
the numerator of this expression, cleared of the square root, is the
explicit quasilinear operator evaluated by ``graph_operator``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import BoundaryPoint
from .geometry import Model, Point3, connection_coefficients, metric_at, numerical_jacobian
from .surfaces import (
    GraphFunction,
    InvariantSurface,
    as_graph,
    is_closed_form,
    sample_points,
)

DIVFORM_STEP = 1e-4
DIVFORM_TOL = 1e-5


def _interior(x, y, model: Model):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if model is Model.HALF_SPACE:
        ok = y > 1e-14
    else:
        ok = 1.0 - x * x - y * y > 1e-14
    if not np.all(ok):
        raise BoundaryPoint("point outside the interior of the model")


def generalized_gradient(u: GraphFunction, p, tau: float, model: Model = Model.HALF_SPACE):
    """Coordinate components (G^x, G^y) of the generalized gradient at ``p``."""
    model = Model.parse(model)
    x, y = p
    _interior(x, y, model)
    lam, a, b = connection_coefficients(x, y, tau, model)
    ux, uy = u.grad(x, y)
    inv = 1.0 / (lam * lam)
    return inv * (ux + a), inv * (uy + b)


def graph_operator(y, ux, uy, uxx, uxy, uyy, tau: float):
    """Half-space minimal-graph operator as a polynomial in the derivatives of u."""
    return (
        y * uy ** 3
        - (1.0 + 4.0 * tau * tau + y * ux * (-4.0 * tau + y * ux)) * uyy
        + uy * (-2.0 * tau + y * ux) * (ux + 2.0 * y * uxy)
        - uxx
        - y * y * uy * uy * uxx
    )


def residual_eq5(u: GraphFunction, p, tau: float):
    """Explicit minimal-graph residual at ``p`` using u's analytic derivatives."""
    x, y = p
    _interior(x, y, Model.HALF_SPACE)
    ux, uy = u.grad(x, y)
    uxx, uxy, uyy = u.hess(x, y)
    return graph_operator(np.asarray(y, dtype=float), ux, uy, uxx, uxy, uyy, tau)


def _flux(u: GraphFunction, x, y, tau: float, model: Model):
    lam, a, b = connection_coefficients(x, y, tau, model)
    ux, uy = u.grad(x, y)
    px, py = ux + a, uy + b
    w = np.sqrt(1.0 + (px * px + py * py) / (lam * lam))
    return px / w, py / w, lam


def mean_curvature_divform(u: GraphFunction, p, tau: float, model: Model = Model.HALF_SPACE,
                           h: float = DIVFORM_STEP):
    """H from centered differences of the divergence form, Richardson-refined in h."""
    model = Model.parse(model)
    x, y = (np.asarray(v, dtype=float) for v in p)
    _interior(x, y, model)
    if model is Model.HALF_SPACE:
        _interior(x, y - 2 * h, model)
    else:
        _interior(np.abs(x) + 2 * h, np.abs(y) + 2 * h, model)

    def div(step):
        fxp, _, _ = _flux(u, x + step, y, tau, model)
        fxm, _, _ = _flux(u, x - step, y, tau, model)
        _, fyp, _ = _flux(u, x, y + step, tau, model)
        _, fym, _ = _flux(u, x, y - step, tau, model)
        return ((fxp - fxm) + (fyp - fym)) / (2.0 * step)

    d1, d2 = div(h), div(h / 2.0)
    lam, _, _ = connection_coefficients(x, y, tau, model)
    return 0.5 * (d2 + (d2 - d1) / 3.0) / (lam * lam)


@dataclass
class VerificationReport:
    surface: dict
    tau: float
    n_samples: int
    max_residual: float
    max_H: float
    tol: float
    divform_tol: float
    passed: bool
    worst_points: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def verify_graph(u: GraphFunction, xs, ys, tau: float, tol: float, description=None,
                 divform_tol: float = DIVFORM_TOL, h: float = DIVFORM_STEP,
                 n_worst: int = 5, workers: int = 1) -> VerificationReport:
    """Evaluate both minimality operators at the given points and summarize."""
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()

    def chunk(idx):
        px, py = xs[idx], ys[idx]
        res = np.abs(residual_eq5(u, (px, py), tau))
        hh = np.abs(mean_curvature_divform(u, (px, py), tau, Model.HALF_SPACE, h))
        return idx, res, hh

    parts = np.array_split(np.arange(xs.size), max(1, workers))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(chunk, parts))
    else:
        results = [chunk(p) for p in parts]
    res = np.empty(xs.size)
    hh = np.empty(xs.size)
    for idx, r, q in results:
        res[idx] = r
        hh[idx] = q
    bad = ~np.isfinite(res) | ~np.isfinite(hh)
    max_res = float(np.max(np.where(bad, np.inf, res)))
    max_h = float(np.max(np.where(bad, np.inf, hh)))
    order = np.lexsort((np.arange(xs.size), -np.where(bad, np.inf, res)))[:n_worst]
    worst = [{"x": float(xs[i]), "y": float(ys[i]), "residual": float(res[i]), "H": float(hh[i])}
             for i in order]
    passed = bool(max_res < tol and max_h < divform_tol)
    return VerificationReport(description or {"graph": u.name}, tau, int(xs.size), max_res, max_h,
                              tol, divform_tol, passed, worst)


def default_tolerance(surface: InvariantSurface) -> float:
    """1e-10 for closed-form families, 1e-6 for quadrature-backed ones."""
    return 1e-10 if is_closed_form(surface.family) else 1e-6


def verify_surface(surface: InvariantSurface, n_samples: int = 200, tol: float | None = None,
                   margin: float = 0.05, workers: int = 1, **kw) -> VerificationReport:
    tol = default_tolerance(surface) if tol is None else tol
    xs, ys = sample_points(surface, n_samples, margin)
    return verify_graph(as_graph(surface), xs, ys, surface.tau, tol, surface.describe(),
                        workers=workers, **kw)


def _model_box(model: Model, n: int, rng: np.random.Generator):
    if model is Model.HALF_SPACE:
        x = rng.uniform(-2.0, 2.0, n)
        y = rng.uniform(0.2, 3.0, n)
    else:
        rad = 0.85 * np.sqrt(rng.uniform(0.0, 1.0, n))
        ang = rng.uniform(0.0, 2 * math.pi, n)
        x, y = rad * np.cos(ang), rad * np.sin(ang)
    t = rng.uniform(-2.0, 2.0, n)
    return [Point3(float(a), float(b), float(c), model) for a, b, c in zip(x, y, t)]


def _jacobian_step(p: Point3) -> float:
    # the Richardson-refined difference is fourth order, so a step of 1e-3 of the
    # distance to the ideal boundary keeps truncation below rounding
    scale = p.y if p.model is Model.HALF_SPACE else 1.0 - math.hypot(p.x, p.y)
    return 1e-3 * min(1.0, scale)


def metric_deviation(fmap: Callable[[Point3], Point3], p: Point3, tau: float, h: float | None = None) -> float:
    """max |J^T g(f(p)) J - g(p)| with J a finite-difference Jacobian of ``fmap``."""
    h = _jacobian_step(p) if h is None else h
    target = fmap(p)

    def as_array(v):
        q = fmap(Point3(float(v[0]), float(v[1]), float(v[2]), p.model))
        return q.as_array()

    jac = numerical_jacobian(as_array, p.as_array(), h)
    pulled = jac.T @ metric_at(target, tau) @ jac
    return float(np.max(np.abs(pulled - metric_at(p, tau))))


def verify_isometry(fmap: Callable[[Point3], Point3], tau: float, n_samples: int = 100,
                    model: Model = Model.HALF_SPACE, seed: int = 0, points=None) -> float:
    """Largest metric-pullback deviation of ``fmap`` over sampled points."""
    model = Model.parse(model)
    rng = np.random.default_rng(seed)
    pts = points if points is not None else _model_box(model, n_samples, rng)
    return max(metric_deviation(fmap, p, tau) for p in pts)
