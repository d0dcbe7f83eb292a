"""Curves in the asymptotic boundary S^1 x R and their vertical gaps.

A curve is a finite union of polylines. In the cylinder model a vertex is
(theta, t) and consecutive vertices are joined by the shorter angular step,
so a component may wind once around the cylinder. In the half-space model a
vertex is (x, t); a component is either a closed polygon or passes once
through the point at infinity, in which case its first vertex continues as a
horizontal ray to x = -inf and its last vertex as a horizontal ray to +inf.

The height h(p) at an abscissa p is the length of the shortest bounded
component of the fiber {p} x R minus the curve, and +inf when the fiber
meets the curve at most once. Between consecutive vertex abscissae every
crossing height is affine in p and their order is fixed, so each gap is
affine there and its infimum is attained at an end of the interval.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BadParameter, DegenerateFiber, IdealPole, InvalidCurve
from .geometry import Model, boundary_to_cylinder, boundary_to_half_space
from .surfaces import critical_height

TWO_PI = 2.0 * math.pi
_MERGE = 1e-12


class Direction(enum.Enum):
    HALF_TO_CYL = "half-to-cyl"
    CYL_TO_HALF = "cyl-to-half"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, Direction):
            return value
        for d in cls:
            if value in (d.value, d.name):
                return d
        raise BadParameter(f"unknown transport direction {value!r}")


def _angular_step(a, b):
    """Signed step from a to b reduced to (-pi, pi]."""
    d = math.remainder(b - a, TWO_PI)
    return math.pi if d == -math.pi else d


@dataclass
class _Pieces:
    """Non-vertical pieces as affine functions on [lo, hi] and vertical pieces."""

    lo: np.ndarray
    hi: np.ndarray
    x0: np.ndarray
    t0: np.ndarray
    slope: np.ndarray
    vx: np.ndarray
    vlo: np.ndarray
    vhi: np.ndarray

    def value(self, idx, p):
        return self.t0[idx] + self.slope[idx] * (p - self.x0[idx])


class IdealBoundaryCurve:
    """Closed simple polylines in the asymptotic boundary, validated on construction."""

    def __init__(self, components, model: Model = Model.CYLINDER, through_infinity=None,
                 validate: bool = True):
        self.model = Model.parse(model)
        comps = []
        for c in components:
            arr = np.array(c, dtype=float).reshape(-1, 2)
            if not np.all(np.isfinite(arr)):
                raise InvalidCurve("vertices must be finite")
            comps.append(arr)
        if not comps:
            raise InvalidCurve("a curve needs at least one component")
        if through_infinity is None:
            through_infinity = [False] * len(comps)
        self.through_infinity = tuple(bool(f) for f in through_infinity)
        if len(self.through_infinity) != len(comps):
            raise InvalidCurve("one through_infinity flag per component")
        if self.model is Model.CYLINDER and any(self.through_infinity):
            raise InvalidCurve("only half-space components pass through infinity")
        cleaned = []
        for arr, inf in zip(comps, self.through_infinity):
            if self.model is Model.CYLINDER:
                arr = arr.copy()
                arr[:, 0] = np.mod(arr[:, 0], TWO_PI)
            if not inf and len(arr) > 1 and self._same_point(arr[0], arr[-1]):
                arr = arr[:-1]
            if len(arr) < (1 if inf else 3):
                raise InvalidCurve("closed components need at least three distinct vertices")
            cleaned.append(arr)
        self.components = cleaned
        self._segments = self._build_segments()
        if validate:
            self._validate()
        self._pieces = self._build_pieces()

    def _same_point(self, a, b) -> bool:
        if self.model is Model.CYLINDER:
            return abs(_angular_step(a[0], b[0])) < 1e-14 and abs(a[1] - b[1]) < 1e-14
        return bool(np.all(np.abs(a - b) < 1e-14))

    # -- segments in unwrapped coordinates -------------------------------------------------

    def _build_segments(self):
        """List of (component, a, b) with a, b points; angular steps already unwrapped."""
        segs = []
        for ci, (arr, inf) in enumerate(zip(self.components, self.through_infinity)):
            m = len(arr)
            if self.model is Model.CYLINDER:
                total = 0.0
                for j in range(m):
                    a, b = arr[j], arr[(j + 1) % m]
                    d = _angular_step(a[0], b[0])
                    if abs(abs(d) - math.pi) < 1e-12:
                        raise InvalidCurve("an angular step of pi is ambiguous; sample the curve more finely")
                    total += d
                    segs.append((ci, (a[0], a[1]), (a[0] + d, b[1])))
                winding = total / TWO_PI
                if abs(winding - round(winding)) > 1e-9 or abs(round(winding)) > 1:
                    raise InvalidCurve("a simple closed component winds at most once around the cylinder")
            else:
                last = m - 1 if inf else m
                for j in range(last):
                    a, b = arr[j], arr[(j + 1) % m]
                    segs.append((ci, (a[0], a[1]), (b[0], b[1])))
        return segs

    def winding(self, index: int) -> int:
        if self.model is not Model.CYLINDER:
            return 0
        arr = self.components[index]
        m = len(arr)
        total = sum(_angular_step(arr[j][0], arr[(j + 1) % m][0]) for j in range(m))
        return int(round(total / TWO_PI))

    def _ray_segments(self):
        xs = np.concatenate([c[:, 0] for c in self.components])
        left, right = float(xs.min()) - 1.0, float(xs.max()) + 1.0
        rays = []
        for ci, (arr, inf) in enumerate(zip(self.components, self.through_infinity)):
            if inf:
                rays.append((ci, (left, arr[0][1]), (arr[0][0], arr[0][1])))
                rays.append((ci, (arr[-1][0], arr[-1][1]), (right, arr[-1][1])))
        return rays

    def _validate(self):
        segs = self._segments + (self._ray_segments() if self.model is Model.HALF_SPACE else [])
        n = len(segs)
        P0 = np.array([s[1] for s in segs])
        Q0 = np.array([s[2] for s in segs])
        comp = np.array([s[0] for s in segs])
        adjacent = self._adjacency(segs)
        shifts = (-TWO_PI, 0.0, TWO_PI) if self.model is Model.CYLINDER else (0.0,)
        # copies of every segment under each period shift, swept in x
        P = np.concatenate([P0 + np.array([sh, 0.0]) for sh in shifts])
        Q = np.concatenate([Q0 + np.array([sh, 0.0]) for sh in shifts])
        orig = np.tile(np.arange(n), len(shifts))
        shift = np.repeat(np.array(shifts), n)
        scale = 1.0 + float(np.max(np.abs(np.concatenate([P0, Q0]))))
        eps = 1e-12 * scale
        xmin, xmax = np.minimum(P[:, 0], Q[:, 0]), np.maximum(P[:, 0], Q[:, 0])
        tmin, tmax = np.minimum(P[:, 1], Q[:, 1]), np.maximum(P[:, 1], Q[:, 1])
        order = np.argsort(xmin, kind="stable")
        xs = xmin[order]
        ends = np.searchsorted(xs, xmax[order] + eps, side="right")
        counts = ends - np.arange(order.size) - 1
        a_idx = np.repeat(np.arange(order.size), np.maximum(counts, 0))
        offsets = np.arange(a_idx.size) - np.repeat(np.cumsum(np.maximum(counts, 0)) - np.maximum(counts, 0),
                                                   np.maximum(counts, 0))
        b_idx = a_idx + 1 + offsets
        A, B = order[a_idx], order[b_idx]
        keep = ((shift[A] == 0.0) | (shift[B] == 0.0)) & (orig[A] != orig[B])
        keep &= (tmin[A] <= tmax[B] + eps) & (tmin[B] <= tmax[A] + eps)
        A, B = A[keep], B[keep]
        hit = _segments_intersect(P[A], Q[A], P[B], Q[B], eps)
        for u, v in zip(A[hit], B[hit]):
            if orig[u] > orig[v]:
                u, v = v, u
            i, j = int(orig[u]), int(orig[v])
            rel = float(shift[v] - shift[u])
            if adjacent.get((i, j)) == rel:
                if _overlapping(P[u], Q[u], P[v], Q[v], eps):
                    raise InvalidCurve(f"component {comp[i]} doubles back on itself")
                continue
            raise InvalidCurve(f"segments of components {comp[i]} and {comp[j]} intersect")

    def _adjacency(self, segs):
        """Map (i, j), i < j, of consecutive segments to the shift of j that joins them."""
        adj = {}
        ranges = {}
        for idx, sg in enumerate(self._segments):
            ranges.setdefault(sg[0], []).append(idx)
        rays = {}
        for idx in range(len(self._segments), len(segs)):
            rays.setdefault(segs[idx][0], []).append(idx)

        def joint(x):
            return round(x / TWO_PI) * TWO_PI if self.model is Model.CYLINDER else 0.0

        for ci, idxs in ranges.items():
            for i, j in zip(idxs[:-1], idxs[1:]):
                adj[(i, j)] = joint(segs[i][2][0] - segs[j][1][0])
            if not self.through_infinity[ci] and len(idxs) > 2:
                first, last = idxs[0], idxs[-1]
                adj[(first, last)] = joint(segs[first][1][0] - segs[last][2][0])
        for ci, (left, right) in rays.items():
            idxs = ranges.get(ci, [])
            if idxs:
                adj[(idxs[0], left)] = 0.0
                adj[(idxs[-1], right)] = 0.0
            else:
                adj[(left, right)] = 0.0
        return adj

    # -- fiber pieces -----------------------------------------------------------------------

    def _build_pieces(self) -> _Pieces:
        lo, hi, x0, t0, sl = [], [], [], [], []
        vx, vlo, vhi = [], [], []

        def add(a, b):
            (xa, ta), (xb, tb) = a, b
            if xa == xb:
                vx.append(xa)
                vlo.append(min(ta, tb))
                vhi.append(max(ta, tb))
                return
            s = (tb - ta) / (xb - xa)
            lo.append(min(xa, xb))
            hi.append(max(xa, xb))
            x0.append(xa)
            t0.append(ta)
            sl.append(s)

        for _, a, b in self._segments:
            if self.model is Model.CYLINDER:
                xa, xb = a[0], b[0]
                if xa == xb:
                    add(a, b)
                    continue
                s = (b[1] - a[1]) / (xb - xa)
                # fold the unwrapped segment into pieces inside [0, 2 pi]
                base = math.floor(min(xa, xb) / TWO_PI)
                for k in (base, base + 1):
                    l = max(min(xa, xb), k * TWO_PI)
                    h = min(max(xa, xb), (k + 1) * TWO_PI)
                    if h > l:
                        tl = a[1] + s * (l - xa)
                        th = a[1] + s * (h - xa)
                        add((l - k * TWO_PI, tl), (h - k * TWO_PI, th))
            else:
                add(a, b)
        for arr, inf in zip(self.components, self.through_infinity):
            if inf:
                # horizontal rays: x < first vertex and x > last vertex
                for lo_, hi_, (xa, ta) in ((-math.inf, arr[0][0], arr[0]), (arr[-1][0], math.inf, arr[-1])):
                    lo.append(lo_)
                    hi.append(hi_)
                    x0.append(xa)
                    t0.append(ta)
                    sl.append(0.0)
        vx_arr = np.array(vx, dtype=float)
        if self.model is Model.CYLINDER and vx_arr.size:
            vx_arr = np.mod(vx_arr, TWO_PI)
        return _Pieces(np.array(lo, float), np.array(hi, float), np.array(x0, float), np.array(t0, float),
                       np.array(sl, float), vx_arr, np.array(vlo, float), np.array(vhi, float))

    def _normalize(self, p: float) -> float:
        if self.model is Model.CYLINDER:
            p = math.fmod(p, TWO_PI)
            return p + TWO_PI if p < 0 else p
        return float(p)

    def fiber_occupancy(self, p: float):
        """Sorted, merged list of [lo, hi] height intervals where the fiber meets the curve."""
        p = self._normalize(p)
        P = self._pieces
        probes = [p, TWO_PI] if (self.model is Model.CYLINDER and p == 0.0) else [p]
        occupied = []
        degenerate = False
        for q in probes:
            hit = np.nonzero((P.lo <= q) & (q <= P.hi))[0]
            for i in hit:
                v = float(P.t0[i] + (P.slope[i] * (q - P.x0[i]) if P.slope[i] != 0 else 0.0))
                occupied.append((v, v))
            if P.vx.size:
                vq = q % TWO_PI if self.model is Model.CYLINDER else q
                for i in np.nonzero(np.abs(P.vx - vq) <= 1e-15 * (1 + abs(vq)))[0]:
                    occupied.append((float(P.vlo[i]), float(P.vhi[i])))
                    degenerate = True
        occupied.sort()
        merged = []
        for a, b in occupied:
            if merged and a <= merged[-1][1] + _MERGE * (1 + abs(a)):
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return merged, degenerate

    def breakpoints(self) -> np.ndarray:
        P = self._pieces
        pts = np.concatenate([P.lo, P.hi, P.vx])
        pts = pts[np.isfinite(pts)]
        if self.model is Model.CYLINDER:
            pts = np.concatenate([pts, [0.0, TWO_PI]])
        pts = np.unique(pts)
        if pts.size < 2:
            return pts
        # collapse breakpoints a few ulps apart; they are one vertex reached along different paths
        tol = SLIVER * np.maximum(1.0, np.abs(pts[1:]))
        keep = np.concatenate([[True], np.diff(pts) > tol])
        if self.model is Model.CYLINDER:
            keep[-1] = True
            keep[:-1] &= ~((TWO_PI - pts[:-1] <= SLIVER * TWO_PI) & (np.arange(pts.size - 1) > 0))
        return pts[keep]

    def shifted(self, dtheta: float = 0.0, dt: float = 0.0) -> "IdealBoundaryCurve":
        comps = [c + np.array([dtheta, dt]) for c in self.components]
        return IdealBoundaryCurve(comps, self.model, self.through_infinity, validate=False)

    def to_dict(self) -> dict:
        return {"model": self.model.value,
                "components": [c.tolist() for c in self.components],
                "through_infinity": list(self.through_infinity)}


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])


def _on_segment(a, b, c, eps):
    return ((np.minimum(a[..., 0], b[..., 0]) - eps <= c[..., 0]) & (c[..., 0] <= np.maximum(a[..., 0], b[..., 0]) + eps)
            & (np.minimum(a[..., 1], b[..., 1]) - eps <= c[..., 1])
            & (c[..., 1] <= np.maximum(a[..., 1], b[..., 1]) + eps))


def _segments_intersect(p1, p2, q1, q2, eps):
    """Closed-segment intersection test, broadcasting over leading axes."""
    shape = np.broadcast_shapes(p1.shape, q1.shape)
    p1, p2 = np.broadcast_to(p1, shape), np.broadcast_to(p2, shape)
    q1, q2 = np.broadcast_to(q1, shape), np.broadcast_to(q2, shape)
    o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    tol = eps * eps
    proper = (((o1 > tol) & (o2 < -tol)) | ((o1 < -tol) & (o2 > tol))) & \
             (((o3 > tol) & (o4 < -tol)) | ((o3 < -tol) & (o4 > tol)))
    touch = ((np.abs(o1) <= tol) & _on_segment(p1, p2, q1, eps)) | \
            ((np.abs(o2) <= tol) & _on_segment(p1, p2, q2, eps)) | \
            ((np.abs(o3) <= tol) & _on_segment(q1, q2, p1, eps)) | \
            ((np.abs(o4) <= tol) & _on_segment(q1, q2, p2, eps))
    return proper | touch


def _overlapping(p1, p2, q1, q2, eps) -> bool:
    """Whether two segments sharing an endpoint overlap along a common line."""
    d1, d2 = p2 - p1, q2 - q1
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) > eps * (1 + np.linalg.norm(d1) * np.linalg.norm(d2)):
        return False
    # collinear: they overlap iff more than the shared endpoint is common
    pts = [q1, q2]
    n = np.dot(d1, d1)
    inside = [0.0 + eps < np.dot(q - p1, d1) / n < 1.0 - eps for q in pts]
    back = [0.0 + eps < np.dot(p - q1, d2) / np.dot(d2, d2) < 1.0 - eps for p in (p1, p2)]
    return any(inside) or any(back)


# -- heights ------------------------------------------------------------------------------

def _gaps(occupied):
    return [occupied[i + 1][0] - occupied[i][1] for i in range(len(occupied) - 1)]


def height_function(curve: IdealBoundaryCurve, p: float, strict: bool = False) -> float:
    """Length of the shortest bounded gap of the curve along the fiber over p.

    Returns +inf when the fiber meets the curve at most once. A vertical
    segment of the curve inside the fiber counts as part of the curve; with
    ``strict=True`` such fibers raise DegenerateFiber instead.
    """
    occ, degenerate = curve.fiber_occupancy(p)
    if degenerate and strict:
        raise DegenerateFiber(f"the fiber over {p!r} contains a vertical segment of the curve")
    g = _gaps(occ)
    return min(g) if g else math.inf


def height_profile(curve: IdealBoundaryCurve, ps) -> np.ndarray:
    return np.array([height_function(curve, float(p)) for p in np.ravel(ps)])


@dataclass(frozen=True)
class _Interval:
    left: float
    right: float
    gaps_left: np.ndarray
    gaps_right: np.ndarray


SLIVER = 64 * np.finfo(float).eps


def _interval_gaps(curve: IdealBoundaryCurve):
    """Affine gap functions on every open interval between consecutive breakpoints."""
    P = curve._pieces
    bps = curve.breakpoints()
    edges = list(zip(bps[:-1], bps[1:]))
    out = []
    probes = []
    for l, r in edges:
        # slivers of a few ulps come from vertices computed along different paths;
        # their affine pieces are not resolvable, and the breakpoints are evaluated exactly
        if r - l <= SLIVER * max(1.0, abs(l), abs(r)):
            continue
        probes.append((l, r, 0.5 * (l + r)))
    if curve.model is Model.HALF_SPACE and bps.size:
        probes.insert(0, (-math.inf, bps[0], bps[0] - 1.0))
        probes.append((bps[-1], math.inf, bps[-1] + 1.0))
    if curve.model is Model.HALF_SPACE and bps.size == 0:
        probes.append((-math.inf, math.inf, 0.0))
    for l, r, m in probes:
        active = np.nonzero((P.lo <= m) & (m <= P.hi) & (P.lo < P.hi))[0]
        if active.size < 2:
            out.append(_Interval(l, r, np.array([]), np.array([])))
            continue
        order = active[np.argsort(P.value(active, m))]

        def at(q):
            if not math.isfinite(q):
                q = m
            vals = P.t0[order] + P.slope[order] * (q - P.x0[order])
            return np.diff(vals)

        out.append(_Interval(l, r, at(l), at(r)))
    return out, bps


@dataclass
class HeightInfimum:
    value: float
    location: float
    attained: bool


def height_infimum(curve: IdealBoundaryCurve) -> HeightInfimum:
    """Exact infimum of h over the whole circle (or line) of fibers."""
    best = HeightInfimum(math.inf, math.nan, False)
    intervals, bps = _interval_gaps(curve)
    for iv in intervals:
        for q, g in ((iv.left, iv.gaps_left), (iv.right, iv.gaps_right)):
            if g.size and float(g.min()) < best.value:
                best = HeightInfimum(float(g.min()), float(q if math.isfinite(q) else 0.5 * (iv.left + iv.right)),
                                     False)
    for b in bps:
        h = height_function(curve, float(b))
        if h <= best.value:
            best = HeightInfimum(h, float(b), True)
    return best


def is_tall(curve: IdealBoundaryCurve, tau: float) -> bool:
    """Whether h exceeds sqrt(1 + 4 tau^2) pi at every fiber."""
    return height_infimum(curve).value > critical_height(tau)


def tallness_report(curve: IdealBoundaryCurve, tau: float) -> dict:
    inf = height_infimum(curve)
    thr = critical_height(tau)
    witnesses = []
    if math.isfinite(inf.value):
        witnesses.append({"kind": "infimum", "p": inf.location, "height": inf.value,
                          "attained": inf.attained})
    return {"tall": bool(inf.value > thr), "inf_height": inf.value, "threshold": thr,
            "witnesses": witnesses}


# -- hypothesis checkers ------------------------------------------------------------------

def _subthreshold_sets(curve: IdealBoundaryCurve, c: float):
    """Open intervals where h < c, before merging across breakpoints."""
    intervals, bps = _interval_gaps(curve)
    pieces = []
    for iv in intervals:
        l, r = iv.left, iv.right
        if not iv.gaps_left.size:
            continue
        for gl, gr in zip(iv.gaps_left, iv.gaps_right):
            if not (math.isfinite(l) and math.isfinite(r)):
                if gl < c:
                    pieces.append((l, r))
                continue
            if gl < c and gr < c:
                pieces.append((l, r))
            elif gl < c <= gr:
                pieces.append((l, l + (c - gl) / (gr - gl) * (r - l)))
            elif gr < c <= gl:
                pieces.append((r - (c - gr) / (gl - gr) * (r - l), r))
    return pieces, bps


def subthreshold_intervals(curve: IdealBoundaryCurve, threshold: float):
    """Maximal open intervals of fibers with h < threshold, as (left, right) pairs."""
    pieces, bps = _subthreshold_sets(curve, threshold)
    inside_bp = {float(b) for b in bps if height_function(curve, float(b)) < threshold}
    pieces.sort()
    merged = []
    for a, b in pieces:
        if merged and (a < merged[-1][1] or (a == merged[-1][1] and a in inside_bp)):
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    if curve.model is Model.CYLINDER and len(merged) > 1:
        first, last = merged[0], merged[-1]
        if first[0] == 0.0 and last[1] == TWO_PI and 0.0 in inside_bp:
            merged = [(last[0], first[1] + TWO_PI)] + merged[1:-1]
    if curve.model is Model.CYLINDER and len(merged) == 1 and merged[0] == (0.0, TWO_PI) and 0.0 in inside_bp:
        return [(0.0, TWO_PI)], True
    return merged, False


@dataclass
class ShortIntervalResult:
    holds: bool
    interval: Optional[tuple]
    full_circle: bool
    intervals: list = field(default_factory=list)
    threshold: float = 0.0

    def to_dict(self) -> dict:
        return {"holds": self.holds, "interval": list(self.interval) if self.interval else None,
                "full_circle": self.full_circle, "intervals": [list(i) for i in self.intervals],
                "threshold": self.threshold}


def check_theorem13_hypothesis(curve: IdealBoundaryCurve, tau: float) -> ShortIntervalResult:
    """Look for an open interval of fibers on which h < sqrt(1 + 4 tau^2) pi.

    Returns the longest maximal such interval. This reports whether the
    hypothesis holds; it says nothing computed about minimizing surfaces.
    """
    thr = critical_height(tau)
    ivs, full = subthreshold_intervals(curve, thr)
    ivs = [iv for iv in ivs if iv[1] > iv[0]]
    if not ivs:
        return ShortIntervalResult(False, None, False, [], thr)
    longest = max(ivs, key=lambda iv: iv[1] - iv[0])
    ivs = [(float(a), float(b)) for a, b in ivs]
    longest = (float(longest[0]), float(longest[1]))
    return ShortIntervalResult(True, longest, full, ivs, thr)


@dataclass
class FoldWitness:
    component: int
    line: float
    side: str
    t_min: float
    t_max: float
    t0: float

    def to_dict(self) -> dict:
        return {"kind": "vertical-line", "component": self.component, "x0": self.line, "side": self.side,
                "t_range": [self.t_min, self.t_max], "t0": self.t0}


@dataclass
class FoldCheckResult:
    holds: bool
    witness: Optional[FoldWitness]
    candidates: int
    best_extent: float
    threshold: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness.to_dict() if self.witness else None,
                "candidates_examined": self.candidates, "best_extent": self.best_extent,
                "threshold": self.threshold}


def _touching_runs(arr: np.ndarray, closed: bool, cylinder: bool):
    """Maximal runs of equal abscissa whose two neighbours lie on the same side.

    Yields (start, stop, x0, side) where vertices start..stop (cyclic) share
    the abscissa x0 and side is "left" or "right".
    """
    m = len(arr)
    x = arr[:, 0]

    def diff(a, b):
        return _angular_step(b, a) if cylinder else a - b

    runs = []
    j = 0
    seen = set()
    indices = range(m) if closed else range(m)
    for j in indices:
        if j in seen:
            continue
        k = j
        while (closed or k + 1 < m) and diff(x[(k + 1) % m], x[j]) == 0 and (k + 1) % m != j:
            k += 1
        i = j
        while (closed or i - 1 >= 0) and diff(x[(i - 1) % m], x[j]) == 0 and (i - 1) % m != k % m:
            i -= 1
        for q in range(i, k + 1):
            seen.add(q % m)
        if not closed and (i - 1 < 0 or k + 1 >= m):
            continue
        before = diff(x[(i - 1) % m], x[j])
        after = diff(x[(k + 1) % m], x[j])
        if before == 0 or after == 0:
            continue
        if (before > 0) == (after > 0):
            runs.append((i, k, float(x[j]), "right" if before > 0 else "left"))
    return runs


def check_theorem12_hypotheses(curve: IdealBoundaryCurve, tau: float) -> FoldCheckResult:
    """Search vertical lines x = x0 and subarcs touching them from one side.

    For polylines a subarc that meets x = x0 without crossing it and has its
    endpoints off the line must contain a maximal run of vertices on the line
    whose neighbours lie on one side. Shrinking the subarc onto that run
    leaves the run's own vertical extent, so a witness exists exactly when
    some run spans less than sqrt(1 + 4 tau^2) pi in t. This reports whether
    the hypotheses hold; it says nothing computed about minimal surfaces.
    """
    thr = critical_height(tau)
    best = None
    best_extent = math.inf
    count = 0
    for ci, (arr, inf) in enumerate(zip(curve.components, curve.through_infinity)):
        m = len(arr)
        for i, k, x0, side in _touching_runs(arr, not inf, curve.model is Model.CYLINDER):
            count += 1
            ts = arr[[q % m for q in range(i, k + 1)], 1]
            lo, hi = float(ts.min()), float(ts.max())
            if hi - lo < best_extent:
                best_extent = hi - lo
                best = FoldWitness(ci, x0, side, lo, hi, lo - 0.5 * (thr - (hi - lo)))
    if best is not None and best_extent < thr:
        return FoldCheckResult(True, best, count, best_extent, thr)
    return FoldCheckResult(False, None, count, best_extent, thr)


# -- transport ----------------------------------------------------------------------------

def _densify(arr: np.ndarray, closed: bool, resolution: int, cylinder: bool) -> np.ndarray:
    """Insert evenly spaced points so the polyline has at least ``resolution`` vertices."""
    m = len(arr)
    if m >= resolution:
        return arr
    nseg = m if closed else m - 1
    if nseg == 0:
        return arr
    extra = resolution - m
    lengths = []
    for j in range(nseg):
        a, b = arr[j], arr[(j + 1) % m]
        dx = _angular_step(a[0], b[0]) if cylinder else b[0] - a[0]
        lengths.append(math.hypot(dx, b[1] - a[1]))
    lengths = np.array(lengths)
    share = np.floor(extra * lengths / lengths.sum()).astype(int) if lengths.sum() > 0 else np.zeros(nseg, int)
    for j in np.argsort(-lengths)[: extra - int(share.sum())]:
        share[j] += 1
    out = []
    for j in range(nseg):
        a, b = arr[j], arr[(j + 1) % m]
        dx = _angular_step(a[0], b[0]) if cylinder else b[0] - a[0]
        out.append(a)
        for s in range(1, share[j] + 1):
            f = s / (share[j] + 1)
            out.append(np.array([a[0] + f * dx, a[1] + f * (b[1] - a[1])]))
    if not closed:
        out.append(arr[-1])
    res = np.array(out)
    if cylinder:
        res[:, 0] = np.mod(res[:, 0], TWO_PI)
    return res


def _split_wide_steps(arr: np.ndarray, closed: bool, max_step: float = math.pi / 2) -> np.ndarray:
    """Add points on half-space segments whose image spans max_step or more in theta.

    theta = pi + 2 arctan x is monotone in x, so the new points are spaced
    evenly in theta and placed on the original segment.
    """
    m = len(arr)
    nseg = m if closed else m - 1
    out = []
    for j in range(nseg):
        a, b = arr[j], arr[(j + 1) % m]
        out.append(a)
        ta, tb = 2.0 * math.atan(a[0]), 2.0 * math.atan(b[0])
        n = int(math.ceil(abs(tb - ta) / max_step))
        for th in np.linspace(ta, tb, n + 1)[1:-1] if n > 1 else ():
            x = math.tan(th / 2.0)
            s = (x - a[0]) / (b[0] - a[0])
            out.append(np.array([x, a[1] + s * (b[1] - a[1])]))
    if not closed:
        out.append(arr[-1])
    return np.array(out)


def _half_to_cyl_points(arr, tau):
    return np.array([boundary_to_cylinder(float(x), float(t), tau) for x, t in arr])


def _cyl_to_half_points(arr, tau):
    return np.array([boundary_to_half_space(float(th), float(t), tau) for th, t in arr])


def transport_boundary(curve: IdealBoundaryCurve, direction, tau: float, resolution: int = 256,
                       ray_samples: int = 16) -> IdealBoundaryCurve:
    """Carry a curve to the other model by the boundary extension of the model change.

    Each component is first refined to at least ``resolution`` vertices in its
    own coordinates, then every vertex is mapped exactly. The point at
    infinity of the half-space and the fiber theta = 0 of the cylinder
    correspond; a component through it is split there. Going to the cylinder,
    the two horizontal rays become arcs approaching theta = 0 and 2 pi, joined
    by the vertical segment that closes the image. Going to the half-space,
    such a vertical segment is removed and the ends continue as rays.
    """
    direction = Direction.parse(direction)
    if resolution < 2:
        raise BadParameter("resolution must be at least 2")
    if direction is Direction.HALF_TO_CYL:
        if curve.model is not Model.HALF_SPACE:
            raise BadParameter("half-to-cyl needs a half-space curve")
        comps = []
        for arr, inf in zip(curve.components, curve.through_infinity):
            dense = _split_wide_steps(_densify(arr, not inf, resolution, False), not inf)
            img = _half_to_cyl_points(dense, tau)
            if inf:
                th_first, th_last = img[0, 0], img[-1, 0]
                left = np.linspace(0.0, th_first, ray_samples + 2)[1:-1]
                right = np.linspace(th_last, TWO_PI, ray_samples + 2)[1:-1]
                x_left = -1.0 / np.tan(left / 2.0)
                x_right = -1.0 / np.tan(right / 2.0)
                pre = _half_to_cyl_points(np.column_stack([x_left, np.full_like(x_left, dense[0, 1])]), tau)
                post = _half_to_cyl_points(np.column_stack([x_right, np.full_like(x_right, dense[-1, 1])]), tau)
                start = np.array([[0.0, dense[0, 1] + 2.0 * tau * math.pi]])
                end = np.array([[0.0, dense[-1, 1] - 2.0 * tau * math.pi]])
                parts = [start, pre, img, post]
                if abs(end[0, 1] - start[0, 1]) > 1e-14:
                    parts.append(end)
                img = np.concatenate(parts)
            comps.append(img)
        try:
            return IdealBoundaryCurve(comps, Model.CYLINDER)
        except InvalidCurve as exc:
            if any(curve.through_infinity):
                raise IdealPole("the closing segments over the exceptional fiber overlap; "
                                "the image is not a simple curve") from exc
            raise

    if curve.model is not Model.CYLINDER:
        raise BadParameter("cyl-to-half needs a cylinder curve")
    comps, flags = [], []
    for ci, arr in enumerate(curve.components):
        dense = _densify(arr, True, resolution, True)
        if curve.winding(ci) < 0:
            dense = dense[::-1]
        on_seam = np.nonzero(dense[:, 0] == 0.0)[0]
        crosses = _seam_crossings(dense)
        if len(on_seam) == 0 and not crosses:
            comps.append(_cyl_to_half_points(dense, tau))
            flags.append(False)
            continue
        if curve.winding(ci) == 0:
            raise IdealPole(f"component {ci} meets the fiber theta = 0 without winding; rotate it first")
        comps.append(_cut_at_seam(dense, tau))
        flags.append(True)
    return IdealBoundaryCurve(comps, Model.HALF_SPACE, flags)


def _seam_crossings(arr) -> list:
    out = []
    m = len(arr)
    for j in range(m):
        a, b = arr[j], arr[(j + 1) % m]
        if a[0] == 0.0 or b[0] == 0.0:
            continue
        d = _angular_step(a[0], b[0])
        if (a[0] + d) >= TWO_PI or (a[0] + d) < 0.0:
            out.append(j)
    return out


def _cut_at_seam(arr, tau) -> np.ndarray:
    """Open a once-winding, increasing-theta component at theta = 0 and map it."""
    m = len(arr)
    crossings = _seam_crossings(arr)
    if crossings:
        j = crossings[0]
        a, b = arr[j], arr[(j + 1) % m]
        d = _angular_step(a[0], b[0])
        f = (TWO_PI - a[0]) / d
        tc = a[1] + f * (b[1] - a[1])
        rolled = np.concatenate([arr[j + 1:], arr[: j + 1]])
        rolled = np.concatenate([[[0.0, tc]], rolled, [[0.0, tc]]])
    else:
        idx = np.nonzero(arr[:, 0] == 0.0)[0]
        # start after the last on-seam vertex of the run that precedes increasing theta
        start = None
        for i in idx:
            nxt = arr[(i + 1) % m]
            if nxt[0] != 0.0 and 0.0 < _angular_step(0.0, nxt[0]):
                start = i
                break
        if start is None:
            raise IdealPole("could not locate where the component leaves the fiber theta = 0")
        rolled = np.concatenate([arr[start:], arr[:start]])
        stop = len(rolled)
        while stop > 1 and rolled[stop - 1, 0] == 0.0:
            stop -= 1
        rolled = np.concatenate([rolled[:stop], [[0.0, rolled[stop % len(rolled), 1]]]])
    interior = rolled[1:-1]
    interior = interior[interior[:, 0] != 0.0]
    if len(interior) == 0:
        raise IdealPole("component has no points off the fiber theta = 0")
    img = _cyl_to_half_points(interior, tau)
    # rays at the exact limiting heights of the image as theta -> 0 and theta -> 2 pi
    left_t = rolled[0, 1] - 2.0 * tau * math.pi
    right_t = rolled[-1, 1] + 2.0 * tau * math.pi
    left = [[2.0 * img[0, 0] - 1.0, left_t]] if abs(img[0, 1] - left_t) > 1e-14 else []
    right = [[2.0 * img[-1, 0] + 1.0, right_t]] if abs(img[-1, 1] - right_t) > 1e-14 else []
    return np.concatenate([np.reshape(left, (-1, 2)), img, np.reshape(right, (-1, 2))])


def polygon_curve(thetas, ts, model: Model = Model.CYLINDER) -> IdealBoundaryCurve:
    return IdealBoundaryCurve([np.column_stack([thetas, ts])], model)


def graph_circle(f, n: int = 720) -> np.ndarray:
    """Vertices (theta, f(theta)) of a curve winding once around the cylinder."""
    th = TWO_PI * np.arange(n) / n
    return np.column_stack([th, np.asarray(f(th), dtype=float) * np.ones_like(th)])


def two_circles(h: float, n: int = 64, lower=None, upper=None) -> IdealBoundaryCurve:
    """Horizontal circles at t = 0 and t = h, or graphs given by callables."""
    lo = graph_circle(lower if lower is not None else (lambda th: 0.0 * th), n)
    hi = graph_circle(upper if upper is not None else (lambda th: h + 0.0 * th), n)
    return IdealBoundaryCurve([lo, hi])

