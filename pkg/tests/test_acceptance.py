"""Acceptance suite.

Each criterion is a function returning ``Line`` records. The tests print one
PASS/FAIL line per record with the measured value and its margin, then assert
that every record passed. Run the file directly for the plain report::

    python tests/test_acceptance.py
"""

import itertools
import math
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest

from slminimal.annulus import (
    AnnulusSpec,
    boundary_gap,
    catenoid_profile_U,
    douglas_sweep,
    douglas_threshold,
    gap_limit,
    lemma42_audit,
)
from slminimal.boundary import is_tall, two_circles
from slminimal.geometry import Model, MoebiusIsometry, Point3, apply_isometry, boundary_jump, to_cylinder, to_half_space
from slminimal.jenkins_serrin import IdealPolygon, jenkins_serrin_check, regular_polygon, truncated_length, \
    truncated_length_numeric
from slminimal.minimality import verify_isometry, verify_surface
from slminimal.plateau import GridProblem, convergence_study, solve
from slminimal.surfaces import (
    Catenoid,
    Fan,
    InvariantSurface,
    SlabBigraph,
    Tilted,
    UmbrellaLimit,
    as_graph,
    catenoid_neck_height,
    catenoid_root,
    critical_height,
    fan_total_height,
    stretch,
    tilted_height,
)


@dataclass
class Line:
    criterion: int
    label: str
    ok: bool
    detail: str

    def __str__(self):
        return f"{'PASS' if self.ok else 'FAIL'} [{self.criterion}] {self.label}: {self.detail}"


def timed(criterion, label, budget, start):
    elapsed = time.perf_counter() - start
    return Line(criterion, label, elapsed < budget, f"{elapsed:.1f} s (budget {budget:.0f} s)")


# -- 1 -------------------------------------------------------------------------------

RESIDUAL_CASES = [
    SlabBigraph(0.5), SlabBigraph(1.0), SlabBigraph(2.0),
    Tilted(1.0, 1.0), Tilted(0.5, -1.0), Tilted(2.0, 0.3),
    Fan(0.5), Fan(1.0), Fan(2.5),
    Catenoid(4.0), Catenoid(10.0), Catenoid(50.0),
    UmbrellaLimit(0.0), UmbrellaLimit(1.0), UmbrellaLimit(3.0),
]


def criterion_residuals():
    start = time.perf_counter()
    lines = []
    for fam, tau in itertools.product(RESIDUAL_CASES, (0.0, 0.5, 1.0)):
        rep = verify_surface(InvariantSurface(fam, 1, tau), 200)
        lines.append(Line(1, f"{rep.surface['family']} {rep.surface['params']} tau={tau}",
                          rep.passed and rep.max_residual < rep.tol,
                          f"max residual {rep.max_residual:.2e} < {rep.tol:.0e}, max |H| {rep.max_H:.2e}"))
    lines.append(timed(1, "residual suite runtime", 30, start))
    return lines


# -- 2 -------------------------------------------------------------------------------

def random_isometries(n, seed=7):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        a, b, c = rng.uniform(-2, 2, 3)
        if abs(a) < 0.3:
            continue
        out.append(MoebiusIsometry(a, b, c, (1 + b * c) / a, rng.uniform(-1, 1)))
    return out


def criterion_isometries():
    start = time.perf_counter()
    lines = []
    fs = random_isometries(20)
    for tau in (0.0, 0.5, 1.0):
        dev_phi = verify_isometry(lambda p: to_cylinder(p, tau), tau, 100)
        dev_psi = verify_isometry(lambda p: to_half_space(p, tau), tau, 100, model=Model.CYLINDER)
        dev_f = max(verify_isometry(lambda p, f=f: apply_isometry(f, p, tau), tau, 100, seed=i)
                    for i, f in enumerate(fs))
        for name, dev in (("half to cylinder", dev_phi), ("cylinder to half", dev_psi),
                          ("20 lifted Moebius maps", dev_f)):
            lines.append(Line(2, f"{name} pullback tau={tau}", dev < 1e-7, f"deviation {dev:.2e} < 1e-7"))

        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(200):
            p = Point3(rng.uniform(-3, 3), rng.uniform(0.1, 3), rng.uniform(-5, 5))
            r, a = 0.95 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
            q = Point3(r * math.cos(a), r * math.sin(a), rng.uniform(-5, 5), Model.CYLINDER)
            worst = max(worst,
                        np.max(np.abs(to_half_space(to_cylinder(p, tau), tau).as_array() - p.as_array())),
                        np.max(np.abs(to_cylinder(to_half_space(q, tau), tau).as_array() - q.as_array())))
        lines.append(Line(2, f"model changes compose to identity tau={tau}", worst <= 1e-12,
                          f"max deviation {worst:.2e} <= 1e-12"))

        jump = max(abs(boundary_jump(f, tau) - 4 * tau * math.pi) for f in fs)
        lines.append(Line(2, f"boundary jump equals 4 tau pi, tau={tau}", jump <= 1e-10,
                          f"max error {jump:.2e} <= 1e-10"))
    lines.append(timed(2, "isometry suite runtime", 10, start))
    return lines


# -- 3 -------------------------------------------------------------------------------

def half_bound(p):
    return math.sqrt(1 + p * p) * math.pi / 2


def criterion_heights():
    lines = []
    worst = 0.0
    for d, tau in itertools.product((0.5, 1.0, 2.0), (0.0, 0.5, 1.0)):
        target = stretch(tau) * math.pi / 2
        worst = max(worst, abs(tilted_height(d, 0.0, tau) - target) / target)
    lines.append(Line(3, "untilted height is sqrt(1+4tau^2) pi/2", worst <= 1e-8, f"max rel error {worst:.2e}"))

    slack = 1e-9
    n, excess = 0, -math.inf
    for d, l, tau, s in itertools.product((0.5, 1.0, 2.0, 3.0), (-3.0, -1.0, -0.5, -0.1, 0.0),
                                          (0.25, 0.5, 1.0, 2.0), (1, -1)):
        L, T = s * l, s * tau
        h = tilted_height(d, L, T)
        excess = max(excess, half_bound(2 * T) - h, h - half_bound(L * d - 2 * T))
        n += 1
    lines.append(Line(3, f"bounds for l tau <= 0 on {n} points", n >= 100 and excess <= slack,
                      f"worst excess {excess:.2e} <= {slack:.0e}"))

    n_up = n_low = 0
    ex_up = ex_low = -math.inf
    for d, frac, tau, s in itertools.product((0.5, 1.0, 2.0, 3.0), (0.05, 0.2, 0.4, 0.6, 0.8, 0.95),
                                             (0.25, 0.5, 1.0, 2.0), (1, -1)):
        T = s * tau
        L = frac * 4 * T / d
        h = tilted_height(d, L, T)
        ex_up = max(ex_up, h - half_bound(2 * T))
        n_up += 1
        if abs(L * d) < 2 * abs(T):
            ex_low = max(ex_low, half_bound(L * d - 2 * T) - h)
            n_low += 1
    lines.append(Line(3, f"upper bound for 0 < l tau < 4 tau^2/d on {n_up} points", n_up >= 100 and ex_up <= slack,
                      f"worst excess {ex_up:.2e} <= {slack:.0e}"))
    # the lower bound's region is half of the grid above, so it gets its own denser grid
    for d, tau, s in itertools.product((0.5, 1.0, 2.0, 3.0), (0.25, 0.5, 1.0, 2.0), (1, -1)):
        T = s * tau
        for frac in np.linspace(0.02, 0.98, 7):
            L = frac * 2 * T / d
            ex_low = max(ex_low, half_bound(L * d - 2 * T) - tilted_height(d, L, T))
            n_low += 1
    lines.append(Line(3, f"lower bound for |ld| < 2|tau|, l tau > 0 on {n_low} points",
                      n_low >= 100 and ex_low <= slack, f"worst excess {ex_low:.2e} <= {slack:.0e}"))
    return lines


# -- 4 -------------------------------------------------------------------------------

def criterion_tall_rectangles():
    lines = []
    for c, tau in itertools.product((0.3, 0.5, 0.7), (0.0, 0.5)):
        h, k = fan_total_height(c, tau), critical_height(tau)
        lines.append(Line(4, f"fan c={c} tau={tau} is taller than critical", h > k,
                          f"height {h:.6f} vs {k:.6f}, margin {h - k:.4f}"))
    return lines


# -- 5 -------------------------------------------------------------------------------

def bisection_root(f, lo, hi, steps=200):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0) == (f(lo) < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def criterion_catenoid():
    lines = []
    for profile in ("transcribed", "minimal"):
        for c, tau in itertools.product((4.0, 10.0, 50.0), (0.0, 0.5)):
            h, half = catenoid_neck_height(c, tau, profile), critical_height(tau) / 2
            lines.append(Line(5, f"catenoid ({profile}) c={c} tau={tau} neck below half critical", h < half,
                              f"height {h:.6f} vs {half:.6f}, margin {half - h:.4f}"))
    oracle = bisection_root(lambda t: -3 + t * t + 10 * t - 4 * t * math.log(t), 1e-12, 1.0)
    r0 = catenoid_root(10.0, "transcribed")
    lines.append(Line(5, "transcribed r0(10) matches bisection", abs(r0 - oracle) <= 1e-10,
                      f"r0 {r0:.17g}, oracle {oracle:.17g}, diff {abs(r0 - oracle):.1e}"))
    c = 10.0
    exact = 2 / (c + math.sqrt(c * c - 4))
    oracle = bisection_root(lambda t: t * t - c * t + 1, 1e-12, 1.0)
    r0 = catenoid_root(c, "minimal")
    lines.append(Line(5, "minimal r0(10) matches bisection", abs(r0 - oracle) <= 1e-10 and abs(r0 - exact) <= 1e-14,
                      f"r0 {r0:.17g}, oracle {oracle:.17g}"))
    return lines


# -- 6 -------------------------------------------------------------------------------

TAU6 = 0.5


def criterion_douglas_threshold():
    start = time.perf_counter()
    lines = []
    grid = np.linspace(0.25, 8.0, 32)
    rows = douglas_sweep(TAU6, grid)
    signs = np.sign([r["margin"] for r in rows])
    changes = int(np.count_nonzero(np.diff(signs)))
    lines.append(Line(6, "sweep margin is negative then positive", signs[0] < 0 < signs[-1] and changes == 1,
                      f"first {rows[0]['margin']:.3e}, last {rows[-1]['margin']:.3e}, {changes} sign change(s)"))
    thr = douglas_threshold(TAU6)
    lines.append(Line(6, "threshold neck parameter exists", 0.25 < thr < 8.0, f"threshold rho_bar {thr:.6f}"))

    limit = gap_limit(TAU6)
    gaps = [boundary_gap(AnnulusSpec(thr, 1.25 * thr, TAU6))] + [r["gap"] for r in rows if r["rho_bar"] >= thr]
    lines.append(Line(6, "gap stays below sqrt(1+4tau^2) pi at and beyond the threshold",
                      max(gaps) < limit, f"max gap {max(gaps):.6f} < {limit:.6f}"))
    lines.append(timed(6, "Douglas sweep runtime", 120, start))
    return lines


def criterion_douglas_gap():
    limit = gap_limit(TAU6)
    gap = boundary_gap(AnnulusSpec(8.0, 10.0, TAU6))
    rel = (limit - gap) / limit
    sup = 2 * stretch(TAU6) * catenoid_profile_U(math.inf, AnnulusSpec(8.0, 10.0, TAU6))
    return [Line(6, "gap within 2% of sqrt(1+4tau^2) pi by rho_bar = 8", rel <= 0.02,
                 f"gap {gap:.6f}, limit {limit:.6f}, shortfall {100 * rel:.2f}% (sup over rho {sup:.6f})")]


def criterion_bound_audit():
    lines = []
    for rho in (2.0, 5.0, 8.0):
        rep = lemma42_audit(AnnulusSpec(rho / 1.25, rho, TAU6), n_theta=10_000)
        lines.append(Line(6, f"area and angular-shift bounds at rho={rho}", rep["holds"],
                          f"integral margin {rep['item1']['margin']:.3e}, "
                          f"v' margins {rep['item2']['worst_lower_margin']:.3e}/"
                          f"{rep['item2']['worst_upper_margin']:.3e}/{rep['item3']['worst_margin']:.3e}"))
    return lines


# -- 7 -------------------------------------------------------------------------------

def criterion_solver():
    start = time.perf_counter()
    lines = []
    for fam in (SlabBigraph(1.0), Tilted(1.0, 1.0)):
        g = as_graph(InvariantSurface(fam, 1, 0.5))
        rows = convergence_study(GridProblem(-1.0, 1.0, 0.2, 0.8, 17, 17, g.eval, 0.5, exact=g.eval), levels=4)
        orders = [r.order for r in rows[1:]]
        lines.append(Line(7, f"{type(fam).__name__} order over 4 halvings from 17x17",
                          len(orders) == 4 and all(1.8 <= o <= 2.2 for o in orders),
                          "orders " + ", ".join(f"{o:.3f}" for o in orders)))
    for name, bc in (("constant", lambda x, y: 1.5 + 0 * x), ("linear", lambda x, y: 0.8 * x)):
        s = solve(GridProblem(-1.0, 1.0, 0.2, 0.8, 33, 33, bc, 0.5, exact=bc), tol=1e-11)
        err = s.max_error()
        lines.append(Line(7, f"{name} data reproduced", err <= 1e-10, f"max error {err:.2e} <= 1e-10"))
    lines.append(timed(7, "solver runtime", 60, start))
    return lines


# -- 8 -------------------------------------------------------------------------------

def criterion_tallness_flip():
    lines = []
    for tau in (0.0, 0.5, 1.0):
        lo, hi = 0.5, 20.0
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if is_tall(two_circles(mid), tau):
                hi = mid
            else:
                lo = mid
        flip, k = 0.5 * (lo + hi), critical_height(tau)
        lines.append(Line(8, f"tallness flip at tau={tau}", abs(flip - k) <= 1e-9,
                          f"flip {flip:.12f}, sqrt(1+4tau^2) pi {k:.12f}"))
    return lines


# -- 9 -------------------------------------------------------------------------------

def criterion_jenkins_serrin():
    res = jenkins_serrin_check(regular_polygon(3, 0.3))
    lines = [Line(9, "symmetric triangle with equal horocycles is balanced",
                  res.balanced and abs(res.alpha - res.beta) < 1e-9, f"|alpha - beta| = {abs(res.alpha - res.beta):.1e}")]
    worst = 0.0
    for poly in (regular_polygon(3, 0.3), regular_polygon(5, 0.1), regular_polygon(4, 0.25, include_origin=False),
                 IdealPolygon((0.1, 1.5, 2.0, 4.0, 5.5), (0.2, 0.05, 0.1, 0.3, 0.15))):
        for u, v, _ in poly.edges():
            worst = max(worst, abs(truncated_length(poly, u, v) - truncated_length_numeric(poly, u, v)))
    lines.append(Line(9, "truncated lengths match arclength quadrature", worst <= 1e-8, f"max diff {worst:.1e}"))
    return lines


CRITERIA = [
    criterion_residuals, criterion_isometries, criterion_heights, criterion_tall_rectangles, criterion_catenoid,
    criterion_douglas_threshold, criterion_douglas_gap, criterion_bound_audit, criterion_solver,
    criterion_tallness_flip, criterion_jenkins_serrin,
]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__.removeprefix("criterion_"))
def test_acceptance(criterion, capsys):
    lines = criterion()
    with capsys.disabled():
        print()
        for line in lines:
            print("   ", line)
    failed = [str(line) for line in lines if not line.ok]
    assert not failed, "\n".join(failed)


if __name__ == "__main__":
    total = failed = 0
    for crit in CRITERIA:
        for line in crit():
            print(line, flush=True)
            total += 1
            failed += not line.ok
    print(f"{total - failed}/{total} checks passed")
    sys.exit(1 if failed else 0)
