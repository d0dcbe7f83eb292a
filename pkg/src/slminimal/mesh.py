"""Triangle meshes of the invariant surfaces, both sheets glued into one patch.

Each family is parametrized by x (or an angle) and a profile variable in
which the glued bigraph is smooth across its vertical tangency:

    slab      y = sin(phi) / d,  t = k (phi - pi/2),            phi in (0, pi)
    tilted    y = d sin(phi),    t = l x + G(phi) - G(pi/2),    phi in (0, pi)
    fan c<1   x = s y, s from chi, t = 2 tau arctan s + P(chi), chi in (-pi/2, pi/2)
    catenoid  r = r0 + (1 - r0) sin^2(phi), t = +-h + 4 tau arctan(x / (y + 1))

Fans with c >= 1 and umbrellas are single graphs and are meshed as one sheet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter
from .geometry import Model
from .surfaces import (
    Catenoid,
    Fan,
    InvariantSurface,
    SlabBigraph,
    Tilted,
    UmbrellaLimit,
    _catenoid_profile,
    _fan_profile,
    _tilted_profile,
    as_graph,
    stretch,
)


@dataclass
class Mesh:
    vertices: np.ndarray  # (n, 3)
    faces: np.ndarray  # (m, 3), zero-based
    model: Model

    def t_range(self):
        return float(self.vertices[:, 2].min()), float(self.vertices[:, 2].max())

    def boundary_edges(self) -> int:
        """Number of edges used by exactly one face."""
        e = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]]), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return int(np.sum(counts == 1))


def _grid_faces(nu: int, nv: int, wrap_u: bool = False) -> np.ndarray:
    """Two triangles per grid cell of an nu x nv vertex grid (index = i * nv + j)."""
    faces = []
    iu = nu if wrap_u else nu - 1
    for i in range(iu):
        i2 = (i + 1) % nu
        for j in range(nv - 1):
            a, b = i * nv + j, i2 * nv + j
            c, d = i2 * nv + j + 1, i * nv + j + 1
            faces.append((a, b, c))
            faces.append((a, c, d))
    return np.array(faces, dtype=np.int64)


def _to_model(x, y, t, tau, model: Model):
    if model is Model.HALF_SPACE:
        return np.column_stack([x, y, t])
    z = x + 1j * y
    w = (z - 1j) / (z + 1j)
    return np.column_stack([w.real, w.imag, t - 4.0 * tau * np.arctan(x / (y + 1.0))])


def _dedupe(vertices: np.ndarray, faces: np.ndarray, digits: int = 12):
    """Merge coincident vertices so faces share indices along common edges."""
    keys = np.round(vertices, digits)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.size)
    new_faces = remap[inverse.ravel()[faces]]
    keep = (new_faces[:, 0] != new_faces[:, 1]) & (new_faces[:, 1] != new_faces[:, 2]) & \
           (new_faces[:, 0] != new_faces[:, 2])
    return vertices[first[order]], new_faces[keep]


def surface_mesh(surface: InvariantSurface, model=Model.HALF_SPACE, n_u: int = 61, n_v: int = 61,
                 extent: float = 2.0, margin: float = 1e-3) -> Mesh:
    """Mesh of the glued surface on a parameter grid, in the requested model."""
    model = Model.parse(model)
    if n_u < 2 or n_v < 2:
        raise BadParameter("mesh needs at least 2 x 2 vertices")
    fam, tau = surface.family, surface.tau
    k = stretch(tau)
    wrap = False
    if isinstance(fam, SlabBigraph):
        xs = np.linspace(-extent, extent, n_u)
        ph = np.linspace(margin, math.pi - margin, n_v)
        X, PH = np.meshgrid(xs, ph, indexing="ij")
        x, y, t = X, np.sin(PH) / fam.d, k * (PH - math.pi / 2)
    elif isinstance(fam, Tilted):
        prof = _tilted_profile(fam.d, fam.l, tau)
        xs = np.linspace(-extent, extent, n_u)
        ph = np.linspace(margin, math.pi - margin, n_v)
        X, PH = np.meshgrid(xs, ph, indexing="ij")
        x, y, t = X, fam.d * np.sin(PH), fam.l * X + prof.cheb(PH) - prof.half
    elif isinstance(fam, Fan) and fam.c < 1:
        prof = _fan_profile(fam.c, tau)
        ys = np.linspace(0.2, 0.2 + extent, n_u)
        ch = np.linspace(-math.pi / 2 + margin, math.pi / 2 - margin, n_v)
        Y, CH = np.meshgrid(ys, ch, indexing="ij")
        s = np.sqrt((1.0 + np.tan(CH) ** 2) / fam.c - 1.0)
        x, y = s * Y, Y
        t = 2.0 * tau * np.arctan(s) + np.sign(CH) * prof.value(s)
    elif isinstance(fam, Fan):
        g = as_graph(surface)
        ys = np.linspace(0.2, 0.2 + extent, n_u)
        lo = -math.pi / 2 + margin if fam.c > 1 else margin
        ps = np.linspace(lo, math.pi / 2 - margin, n_v)
        Y, PS = np.meshgrid(ys, ps, indexing="ij")
        x, y = np.tan(PS) * Y, Y
        t = g.eval(x, y)
    elif isinstance(fam, Catenoid):
        prof = _catenoid_profile(fam.c, tau, fam.profile)
        r0 = prof.r0
        al = 2.0 * math.pi * np.arange(n_u) / n_u
        ph = np.linspace(-math.pi / 2 + margin, math.pi / 2 - margin, n_v)
        AL, PH = np.meshgrid(al, ph, indexing="ij")
        r = r0 + (1.0 - r0) * np.sin(PH) ** 2
        w = np.sqrt(r) * np.exp(1j * AL)
        z = 1j * (1.0 + w) / (1.0 - w)
        x, y = z.real, z.imag
        delta = r - r0
        h = prof.cheb(prof.phi(delta, 1.0 - r))
        t = np.sign(PH) * h + 4.0 * tau * np.arctan(x / (y + 1.0))
        wrap = True
    elif isinstance(fam, UmbrellaLimit):
        g = as_graph(surface)
        xs = np.linspace(-extent, extent, n_u)
        ys = np.linspace(0.1, 0.1 + extent, n_v)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        x, y, t = X, Y, g.eval(X, Y)
    else:
        raise BadParameter(f"unknown family {fam!r}")
    verts = _to_model(np.ravel(x), np.ravel(y), np.ravel(t), tau, model)
    faces = _grid_faces(n_u, n_v, wrap_u=wrap)
    verts, faces = _dedupe(verts, faces)
    return Mesh(verts, faces, model)
