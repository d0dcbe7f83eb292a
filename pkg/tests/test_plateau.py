import numpy as np
import pytest

from slminimal.errors import BadBoundary, BadParameter, NewtonDiverged
from slminimal.minimality import residual_eq5
from slminimal.plateau import GridProblem, convergence_study, harmonic_extension, solve
from slminimal.surfaces import InvariantSurface, SlabBigraph, Tilted, as_graph


def family_problem(fam, tau, n=17):
    g = as_graph(InvariantSurface(fam, 1, tau))
    return GridProblem(-1.0, 1.0, 0.2, 0.8, n, n, g.eval, tau, exact=g.eval)


def test_constant_boundary():
    pr = GridProblem(-1, 1, 0.2, 0.8, 21, 21, lambda x, y: 2.0 + 0.0 * x, 0.5)
    s = solve(pr)
    assert np.max(np.abs(s.U - 2.0)) <= 1e-10


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0])
def test_linear_boundary(tau):
    pr = GridProblem(-1, 1, 0.2, 0.8, 21, 17, lambda x, y: 0.7 * x - 0.1, tau)
    s = solve(pr)
    assert np.max(np.abs(s.U - (0.7 * s.X - 0.1))) <= 1e-10


def test_slab_error_is_small():
    s = solve(family_problem(SlabBigraph(1.0), 0.5, 33))
    assert s.max_error() < 1e-5


def test_tilted_convergence_order():
    rows = convergence_study(family_problem(Tilted(1.0, 1.0), 0.5), levels=3)
    assert all(1.8 <= r.order <= 2.2 for r in rows[1:])


def test_maximum_principle():
    g = lambda x, y: np.sin(2 * x) + y  # noqa: E731
    pr = GridProblem(-1, 1, 0.3, 1.3, 25, 25, g, 0.5)
    s = solve(pr, tol=1e-10)
    edge = np.concatenate([s.U[0], s.U[-1], s.U[:, 0], s.U[:, -1]])
    assert edge.min() - 1e-9 <= s.U.min() and s.U.max() <= edge.max() + 1e-9


def test_deterministic():
    a = solve(family_problem(Tilted(1.0, 1.0), 0.5))
    b = solve(family_problem(Tilted(1.0, 1.0), 0.5))
    assert np.array_equal(a.U, b.U) and a.trace == b.trace


def test_interpolant_residual_off_nodes():
    s = solve(GridProblem(-1, 1, 0.2, 0.8, 17, 17, lambda x, y: 0.3 * x + 1.0, 0.5), tol=1e-10)
    g = s.interpolant()
    rng = np.random.default_rng(0)
    pts = rng.uniform([-0.9, 0.25], [0.9, 0.75], (50, 2))
    res = np.abs(residual_eq5(g, (pts[:, 0], pts[:, 1]), 0.5))
    assert res.max() < 100 * 1e-10


def test_harmonic_initializer_keeps_boundary():
    pr = family_problem(SlabBigraph(1.0), 0.5)
    X, Y, U = harmonic_extension(pr)
    assert np.array_equal(U[0], pr.boundary(X[0], Y[0]))
    assert np.array_equal(U[:, -1], pr.boundary(X[:, -1], Y[:, -1]))


def test_rejects_bad_input():
    with pytest.raises(BadBoundary):
        solve(GridProblem(-1, 1, 0.2, 0.8, 9, 9, lambda x, y: np.inf + 0 * x))
    with pytest.raises(BadParameter):
        GridProblem(-1, 1, 0.0, 0.8, 9, 9, lambda x, y: 0 * x)
    with pytest.raises(BadParameter):
        GridProblem(-1, 1, 0.2, 0.8, 4, 9, lambda x, y: 0 * x)


def test_reports_divergence_with_trace():
    g = lambda x, y: 40.0 * np.sign(x) * np.abs(x) ** 0.2  # noqa: E731
    with pytest.raises(NewtonDiverged) as info:
        solve(GridProblem(-1, 1, 0.2, 0.8, 17, 17, g, 0.5), max_iter=2)
    assert info.value.trace
