"""Jenkins-Serrin conditions for geodesic polygons in the disk with ideal vertices.

The domain Omega has ideal vertices theta_1 < ... < theta_m on the unit
circle and, optionally, the origin as one more vertex. With the origin the
edges are A_1 = [0, theta_1], B_1 = [theta_1, theta_2], A_2, B_2, ... ending
with B_{n+1} = [theta_m, 0] (m = 2n + 1). Without it m is even and edges
alternate A, B starting from [theta_1, theta_2].

Each ideal vertex p carries a horocycle given by its Euclidean diameter
delta in (0, 1). Its hyperbolic distance from the origin is
s_p = log((2 - delta) / delta), and lengths are measured outside the
horoballs:

    |[0, p]| = s_p,
    |[p, q]| = s_p + s_q + 2 log(|p - q| / 2).

The second formula is s_p + s_q minus twice the Gromov product of p and q
seen from the origin; normalizing p, q to 0 and infinity in the upper
half-plane turns it into log of the ratio of the two horoball heights.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BadParameter, OverlappingHorocycles, TooManyVertices

MAX_VERTICES = 16
BALANCE_TOL = 1e-9


@dataclass(frozen=True)
class IdealPolygon:
    """Cyclically ordered ideal vertices (angles) with one horocycle diameter each."""

    angles: tuple
    horocycle_sizes: tuple
    include_origin: bool = True

    def __post_init__(self):
        ang = tuple(float(a) for a in self.angles)
        sizes = tuple(float(s) for s in self.horocycle_sizes)
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "horocycle_sizes", sizes)
        m = len(ang)
        if m + int(self.include_origin) > MAX_VERTICES:
            raise TooManyVertices(f"{m + int(self.include_origin)} vertices exceed the limit of {MAX_VERTICES}")
        if len(sizes) != m:
            raise BadParameter("one horocycle size per ideal vertex")
        if self.include_origin and (m < 3 or m % 2 == 0):
            raise BadParameter("with the origin the number of ideal vertices must be odd and at least 3")
        if not self.include_origin and (m < 4 or m % 2 == 1):
            raise BadParameter("without the origin the number of ideal vertices must be even and at least 4")
        if not all(0.0 < s < 1.0 for s in sizes):
            raise BadParameter("horocycle diameters must lie in (0, 1)")
        steps = np.diff(np.array(ang))
        if np.any(steps <= 0) or ang[-1] - ang[0] >= 2 * math.pi:
            raise BadParameter("angles must increase strictly within one turn")
        pts = self.points()
        for i, j in itertools.combinations(range(m), 2):
            if _pair_length(pts[i], pts[j], sizes[i], sizes[j]) <= 0.0:
                raise OverlappingHorocycles(f"horocycles at vertices {i + 1} and {j + 1} overlap")

    def points(self) -> np.ndarray:
        return np.exp(1j * np.array(self.angles))

    def distances(self) -> np.ndarray:
        """Hyperbolic distance from the origin to each horocycle."""
        d = np.array(self.horocycle_sizes)
        return np.log((2.0 - d) / d)

    def with_sizes(self, sizes) -> "IdealPolygon":
        return IdealPolygon(self.angles, tuple(sizes), self.include_origin)

    def edges(self):
        """Edges as (u, v, label) with u, v vertex keys; the origin is key -1."""
        m = len(self.angles)
        out = []
        if self.include_origin:
            out.append((-1, 0, "A"))
            for i in range(m - 1):
                out.append((i, i + 1, "B" if i % 2 == 0 else "A"))
            out.append((m - 1, -1, "B"))
        else:
            for i in range(m):
                out.append((i, (i + 1) % m, "A" if i % 2 == 0 else "B"))
        return out


def _pair_length(p: complex, q: complex, dp: float, dq: float) -> float:
    sp = math.log((2.0 - dp) / dp)
    sq = math.log((2.0 - dq) / dq)
    return sp + sq + 2.0 * math.log(abs(p - q) / 2.0)


def truncated_length(polygon: IdealPolygon, u: int, v: int) -> float:
    """Length of the geodesic between two vertices outside the horoballs."""
    s = polygon.distances()
    if u == -1 and v == -1:
        return 0.0
    if u == -1 or v == -1:
        return float(s[v if u == -1 else u])
    pts = polygon.points()
    return float(s[u] + s[v] + 2.0 * math.log(abs(pts[u] - pts[v]) / 2.0))


def truncated_length_numeric(polygon: IdealPolygon, u: int, v: int, n: int = 20_001) -> float:
    """Arclength of the same geodesic piece by direct quadrature, as a cross-check.

    The geodesic between two ideal points is the arc of the circle orthogonal
    to the unit circle through them; a radial edge is a diameter. The ends of
    the piece are located by bisection against the horocycle circles and the
    density 2 |dz| / (1 - |z|^2) is integrated by Simpson's rule.
    """
    from scipy.integrate import simpson

    pts = polygon.points()
    sizes = polygon.horocycle_sizes

    def inside(z, k):
        centre = (1.0 - sizes[k] / 2.0) * pts[k]
        return abs(z - centre) < sizes[k] / 2.0

    def boundary(path, t_out, t_in, k):
        for _ in range(100):
            tm = 0.5 * (t_out + t_in)
            if inside(path(tm), k):
                t_in = tm
            else:
                t_out = tm
        return 0.5 * (t_out + t_in)

    if u == -1 or v == -1:
        k = v if u == -1 else u

        def path(r):
            return r * pts[k]

        r_end = boundary(path, 0.0, 1.0, k)
        r = np.linspace(0.0, r_end, n)
        return float(simpson(2.0 / (1.0 - r * r), x=r))
    a, b = polygon.angles[u], polygon.angles[v]
    half = (b - a) / 2.0
    centre = np.exp(1j * (a + b) / 2.0) / math.cos(half)
    radius = abs(math.tan(half))
    start = float(np.angle(pts[u] - centre))
    sweep = math.remainder(float(np.angle(pts[v] - centre)) - start, 2 * math.pi)

    def path(t):
        return centre + radius * np.exp(1j * (start + sweep * t))

    t0 = boundary(path, 0.5, 0.0, u)
    t1 = boundary(path, 0.5, 1.0, v)
    t = np.linspace(t0, t1, n)
    z = path(t)
    return float(simpson(2.0 * radius * abs(sweep) / (1.0 - np.abs(z) ** 2), x=t))


@dataclass
class InscribedMargin:
    vertices: tuple
    alpha: float
    beta: float
    gamma: float

    @property
    def margin(self) -> float:
        return min(self.gamma - 2.0 * self.alpha, self.gamma - 2.0 * self.beta)

    def to_dict(self) -> dict:
        return {"vertices": ["origin" if v == -1 else v + 1 for v in self.vertices],
                "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "margin": self.margin}


@dataclass
class JenkinsSerrinResult:
    alpha: float
    beta: float
    gamma: float
    balanced: bool
    strict: bool
    worst_inscribed: Optional[InscribedMargin]
    n_inscribed: int
    edge_lengths: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "balanced": self.balanced,
                "strict": self.strict, "n_inscribed": self.n_inscribed,
                "worst_inscribed": self.worst_inscribed.to_dict() if self.worst_inscribed else None,
                "edges": self.edge_lengths}


def _polygon_sums(polygon: IdealPolygon, verts: Sequence[int], labels: dict, lengths: dict):
    alpha = beta = gamma = 0.0
    k = len(verts)
    for i in range(k):
        u, v = verts[i], verts[(i + 1) % k]
        key = (u, v) if (u, v) in lengths else (v, u)
        ell = lengths[key] if key in lengths else truncated_length(polygon, u, v)
        gamma += ell
        lab = labels.get((u, v)) or labels.get((v, u))
        if lab == "A":
            alpha += ell
        elif lab == "B":
            beta += ell
    return alpha, beta, gamma


def is_inscribed(polygon: IdealPolygon, subset: Sequence[int]) -> bool:
    """Whether the polygon on the chosen vertices lies in the closure of Omega.

    Consecutive ideal vertices are joined inside Omega when their angular
    step is at most pi. With the origin among the vertices the two radial
    edges always lie in Omega. Without it the closing edge crosses the gap
    outside Omega's angular range and stays in Omega only when that gap is
    at least pi.
    """
    ideal = [v for v in subset if v != -1]
    ang = [polygon.angles[v] for v in ideal]
    if any(b - a > math.pi + 1e-15 for a, b in zip(ang[:-1], ang[1:])):
        return False
    if -1 in subset or not polygon.include_origin:
        return True
    return 2 * math.pi - (ang[-1] - ang[0]) >= math.pi - 1e-15


def inscribed_subsets(polygon: IdealPolygon):
    """Vertex subsets spanning non-degenerate inscribed polygons other than Omega."""
    m = len(polygon.angles)
    everything = tuple(([-1] if polygon.include_origin else []) + list(range(m)))
    for mask in range(1, 1 << m):
        ideal = [i for i in range(m) if mask >> i & 1]
        options = [False, True] if polygon.include_origin else [False]
        for with_origin in options:
            verts = tuple(([-1] if with_origin else []) + ideal)
            if len(verts) < 3 or verts == everything:
                continue
            if is_inscribed(polygon, verts):
                yield verts


def jenkins_serrin_check(polygon: IdealPolygon, workers: int = 1) -> JenkinsSerrinResult:
    """Balance of Omega and the strict inequalities over every inscribed polygon."""
    edges = polygon.edges()
    labels = {(u, v): lab for u, v, lab in edges}
    lengths = {(u, v): truncated_length(polygon, u, v) for u, v, _ in edges}
    order = [u for u, _, _ in edges]
    alpha, beta, gamma = _polygon_sums(polygon, order, labels, lengths)
    balanced = abs(alpha - beta) < BALANCE_TOL

    subsets = list(inscribed_subsets(polygon))

    def evaluate(chunk):
        best = None
        for verts in chunk:
            a, b, g = _polygon_sums(polygon, verts, labels, lengths)
            cand = InscribedMargin(verts, a, b, g)
            if best is None or cand.margin < best.margin:
                best = cand
        return best

    if workers > 1 and len(subsets) > 64:
        chunks = [subsets[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = [p for p in pool.map(evaluate, chunks) if p is not None]
        # ties resolved by vertex tuple so the result does not depend on scheduling
        worst = min(parts, key=lambda c: (c.margin, c.vertices)) if parts else None
    else:
        worst = evaluate(subsets)
    strict = worst is None or worst.margin > 0.0
    edge_report = [{"from": "origin" if u == -1 else u + 1, "to": "origin" if v == -1 else v + 1,
                    "label": lab, "length": lengths[(u, v)]} for u, v, lab in edges]
    return JenkinsSerrinResult(alpha, beta, gamma, bool(balanced), bool(strict), worst, len(subsets),
                               edge_report)


def horocycle_sensitivity(polygon: IdealPolygon, step: float = 1e-6) -> list:
    """Central-difference derivatives of alpha, beta and alpha - beta in each horocycle size."""
    out = []
    base = list(polygon.horocycle_sizes)
    for k in range(len(base)):
        vals = []
        for sgn in (+1, -1):
            sizes = list(base)
            sizes[k] += sgn * step
            poly = polygon.with_sizes(sizes)
            edges = poly.edges()
            labels = {(u, v): lab for u, v, lab in edges}
            lengths = {(u, v): truncated_length(poly, u, v) for u, v, _ in edges}
            a, b, _ = _polygon_sums(poly, [u for u, _, _ in edges], labels, lengths)
            vals.append((a, b))
        (ap, bp), (am, bm) = vals
        da, db = (ap - am) / (2 * step), (bp - bm) / (2 * step)
        out.append({"vertex": k + 1, "d_alpha": da, "d_beta": db, "d_balance": da - db})
    return out


def horocycle_sweep(angles, size_grid, include_origin: bool = True, workers: int = 1):
    """Evaluate every assignment from ``size_grid`` (an iterable of size tuples)."""
    rows = []
    for sizes in size_grid:
        try:
            res = jenkins_serrin_check(IdealPolygon(tuple(angles), tuple(sizes), include_origin), workers)
        except OverlappingHorocycles:
            continue
        rows.append((tuple(sizes), res))
    return rows


def regular_polygon(n_ideal: int, size: float, include_origin: bool = True, span: float = None) -> IdealPolygon:
    """Equally spaced ideal vertices with equal horocycles."""
    if span is None:
        angles = 2 * math.pi * np.arange(n_ideal) / n_ideal
    else:
        angles = np.linspace(0.0, span, n_ideal)
    return IdealPolygon(tuple(angles), (size,) * n_ideal, include_origin)
