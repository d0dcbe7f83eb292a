"""Dirichlet solver for minimal graphs over rectangles of the half-space model.

The minimal-graph operator is quasilinear,

    R(u) = A u_xx + B u_xy + C u_yy + D,
    A = -(1 + y^2 u_y^2),        B = 2 y u_y (y u_x - 2 tau),
    C = -(1 + (y u_x - 2 tau)^2), D = y u_y^3 + u_x u_y (y u_x - 2 tau),

and uniformly elliptic (AC - B^2/4 = 1 + (y u_x - 2 tau)^2 + y^2 u_y^2).
It is discretized by second-order centered differences on a uniform grid
and solved by damped Newton iteration from the harmonic extension of the
boundary data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import RectBivariateSpline

from .errors import BadBoundary, BadParameter, NewtonDiverged
from .minimality import graph_operator
from .surfaces import GraphFunction


@dataclass(frozen=True)
class GridProblem:
    """Rectangle [x0, x1] x [y0, y1] with nx by ny nodes and Dirichlet data."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    boundary: Callable
    tau: float = 0.0
    exact: Optional[Callable] = None

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise BadParameter("nx and ny must be at least 8")
        if not (self.y0 > 0 and self.y1 > self.y0 and self.x1 > self.x0):
            raise BadParameter("need x0 < x1 and 0 < y0 < y1")

    @property
    def hx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    def nodes(self):
        xs = np.linspace(self.x0, self.x1, self.nx)
        ys = np.linspace(self.y0, self.y1, self.ny)
        return np.meshgrid(xs, ys)

    def with_grid(self, nx: int, ny: int) -> "GridProblem":
        return GridProblem(self.x0, self.x1, self.y0, self.y1, nx, ny, self.boundary, self.tau, self.exact)


@dataclass
class Solution:
    problem: GridProblem
    X: np.ndarray
    Y: np.ndarray
    U: np.ndarray
    iterations: int
    residual: float
    trace: list = field(default_factory=list)
    at_rounding_floor: bool = False

    def interpolant(self) -> GraphFunction:
        """Bicubic spline of the nodal values as a graph function."""
        xs, ys = self.X[0], self.Y[:, 0]
        spl = RectBivariateSpline(ys, xs, self.U, kx=3, ky=3, s=0)

        def ev(x, y):
            return spl.ev(y, x)

        def gr(x, y):
            return spl.ev(y, x, dy=1), spl.ev(y, x, dx=1)

        def he(x, y):
            return spl.ev(y, x, dy=2), spl.ev(y, x, dx=1, dy=1), spl.ev(y, x, dx=2)

        return GraphFunction(ev, gr, he, name="bicubic interpolant")

    def max_error(self) -> float:
        if self.problem.exact is None:
            raise BadParameter("problem has no exact solution attached")
        return float(np.max(np.abs(self.U - self.problem.exact(self.X, self.Y))))


def _boundary_values(problem: GridProblem, X, Y):
    U = np.zeros_like(X)
    mask = np.zeros(X.shape, dtype=bool)
    mask[0, :] = mask[-1, :] = mask[:, 0] = mask[:, -1] = True
    vals = np.asarray(problem.boundary(X[mask], Y[mask]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise BadBoundary("boundary data must be finite")
    U[mask] = vals
    return U


def _differences(U, hx, hy):
    """Centered first and second differences at interior nodes."""
    c = U[1:-1, 1:-1]
    ux = (U[1:-1, 2:] - U[1:-1, :-2]) / (2 * hx)
    uy = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2 * hy)
    uxx = (U[1:-1, 2:] - 2 * c + U[1:-1, :-2]) / (hx * hx)
    uyy = (U[2:, 1:-1] - 2 * c + U[:-2, 1:-1]) / (hy * hy)
    uxy = (U[2:, 2:] - U[2:, :-2] - U[:-2, 2:] + U[:-2, :-2]) / (4 * hx * hy)
    return ux, uy, uxx, uxy, uyy


def discrete_residual(U, problem: GridProblem, Y):
    ux, uy, uxx, uxy, uyy = _differences(U, problem.hx, problem.hy)
    return graph_operator(Y[1:-1, 1:-1], ux, uy, uxx, uxy, uyy, problem.tau)


# stencil offsets (di, dj) of the nine-point molecule
_STENCIL = [(0, 0), (0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)]


def _jacobian(U, problem: GridProblem, Y):
    hx, hy, tau = problem.hx, problem.hy, problem.tau
    ux, uy, uxx, uxy, uyy = _differences(U, hx, hy)
    y = Y[1:-1, 1:-1]
    p = y * ux - 2 * tau
    A = -(1 + y * y * uy * uy)
    B = 2 * y * uy * p
    C = -(1 + p * p)
    Rx = 2 * y * y * uy * uxy - 2 * y * p * uyy + uy * (2 * y * ux - 2 * tau)
    Ry = -2 * y * y * uy * uxx + 2 * y * p * uxy + 3 * y * uy * uy + ux * p
    hxx, hyy, hxy = 1 / (hx * hx), 1 / (hy * hy), 1 / (4 * hx * hy)
    coeffs = {
        (0, 0): -2 * A * hxx - 2 * C * hyy,
        (0, 1): A * hxx + Rx / (2 * hx),
        (0, -1): A * hxx - Rx / (2 * hx),
        (1, 0): C * hyy + Ry / (2 * hy),
        (-1, 0): C * hyy - Ry / (2 * hy),
        (1, 1): B * hxy,
        (1, -1): -B * hxy,
        (-1, 1): -B * hxy,
        (-1, -1): B * hxy,
    }
    return _assemble(coeffs, U.shape)


def _assemble(coeffs, shape):
    ny, nx = shape
    mi, mj = ny - 2, nx - 2
    I, J = np.meshgrid(np.arange(mi), np.arange(mj), indexing="ij")
    row = (I * mj + J).ravel()
    rows, cols, vals = [], [], []
    for (di, dj) in _STENCIL:
        ii, jj = I + di, J + dj
        inside = ((ii >= 0) & (ii < mi) & (jj >= 0) & (jj < mj)).ravel()
        rows.append(row[inside])
        cols.append((ii * mj + jj).ravel()[inside])
        vals.append(np.broadcast_to(coeffs[(di, dj)], I.shape).ravel()[inside])
    n = mi * mj
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))


def harmonic_extension(problem: GridProblem):
    """Discrete Laplace solution with the problem's boundary values."""
    X, Y = problem.nodes()
    U = _boundary_values(problem, X, Y)
    hxx, hyy = 1 / problem.hx ** 2, 1 / problem.hy ** 2
    coeffs = {(0, 0): -2 * hxx - 2 * hyy, (0, 1): hxx, (0, -1): hxx, (1, 0): hyy, (-1, 0): hyy,
              (1, 1): 0.0, (1, -1): 0.0, (-1, 1): 0.0, (-1, -1): 0.0}
    L = _assemble(coeffs, U.shape)
    W = U.copy()
    W[1:-1, 1:-1] = 0.0
    rhs = -(((W[1:-1, 2:] + W[1:-1, :-2]) * hxx) + (W[2:, 1:-1] + W[:-2, 1:-1]) * hyy).ravel()
    U[1:-1, 1:-1] = spla.spsolve(L.tocsc(), rhs).reshape(U[1:-1, 1:-1].shape)
    return X, Y, U


def rounding_floor(U, problem: GridProblem, Y) -> float:
    """Size of the residual that double-precision differencing alone produces."""
    ux, uy, _, _, _ = _differences(U, problem.hx, problem.hy)
    y = Y[1:-1, 1:-1]
    p = y * ux - 2 * problem.tau
    scale = (1 + y * y * uy * uy + np.abs(2 * y * uy * p) + 1 + p * p)
    h2 = 1 / problem.hx ** 2 + 1 / problem.hy ** 2
    return float(16 * np.finfo(float).eps * (1 + np.max(np.abs(U))) * np.max(scale) * h2)


def solve(problem: GridProblem, tol: float = 1e-9, max_iter: int = 50) -> Solution:
    """Damped Newton iteration on the discretized minimal-graph equation.

    Iteration stops once the largest nodal residual is below ``tol``. If the
    residual stalls first and is already below the rounding floor of the
    difference quotients, the iterate is returned with ``at_rounding_floor``
    set; any other stall raises NewtonDiverged carrying the iteration trace.
    """
    if not (1e-12 < tol < 1e-4):
        raise BadParameter(f"tol={tol!r} must lie in (1e-12, 1e-4)")
    X, Y, U = harmonic_extension(problem)
    R = discrete_residual(U, problem, Y)
    norm = float(np.linalg.norm(R))
    trace = [{"iteration": 0, "residual_max": float(np.max(np.abs(R))), "residual_l2": norm, "step": 0.0}]
    for it in range(1, max_iter + 1):
        rmax = float(np.max(np.abs(R)))
        if rmax < tol:
            return Solution(problem, X, Y, U, it - 1, rmax, trace)
        if it > 2 and rmax > 0.5 * trace[-2]["residual_max"]:
            if rmax < rounding_floor(U, problem, Y):
                return Solution(problem, X, Y, U, it - 1, rmax, trace, at_rounding_floor=True)
        J = _jacobian(U, problem, Y)
        delta = spla.spsolve(J.tocsc(), -R.ravel()).reshape(R.shape)
        if not np.all(np.isfinite(delta)):
            raise NewtonDiverged("singular Newton system", trace)
        lam = 1.0
        for _ in range(31):
            trial = U.copy()
            trial[1:-1, 1:-1] += lam * delta
            Rt = discrete_residual(trial, problem, Y)
            nt = float(np.linalg.norm(Rt))
            if np.isfinite(nt) and nt < norm:
                break
            lam *= 0.5
        else:
            if rmax < rounding_floor(U, problem, Y):
                return Solution(problem, X, Y, U, it - 1, rmax, trace, at_rounding_floor=True)
            raise NewtonDiverged("line search failed to reduce the residual", trace)
        U, R, norm = trial, Rt, nt
        trace.append({"iteration": it, "residual_max": float(np.max(np.abs(R))), "residual_l2": norm,
                      "step": lam})
    if np.max(np.abs(R)) < tol:
        return Solution(problem, X, Y, U, max_iter, float(np.max(np.abs(R))), trace)
    raise NewtonDiverged(f"no convergence in {max_iter} iterations", trace)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    max_error: float
    order: Optional[float]


def convergence_study(problem: GridProblem, levels: int = 4, n0: int = 17, tol: float = 1e-10):
    """Errors against ``problem.exact`` over ``levels`` successive grid halvings."""
    if problem.exact is None:
        raise BadParameter("convergence study needs an exact solution")
    rows = []
    prev = None
    for lvl in range(levels + 1):
        n = (n0 - 1) * 2 ** lvl + 1
        sol = solve(problem.with_grid(n, n), tol=tol)
        err = sol.max_error()
        order = None
        if prev is not None and err > 0 and prev > 0:
            order = math.log2(prev / err)
        rows.append(ConvergenceRow(n, problem.hx * (problem.nx - 1) / (n - 1), err, order))
        prev = err
    return rows
