"""Barycentric geometry around a subsimplex: hat functions, the slack b,
convex contraction toward a face, and generalized polar coordinates.

For a subsimplex ``f = (x_0, ..., x_m)`` every point of the macroelement
factors as ``x = sum_j lam_j x_j + rho q`` with ``lam = lambda_f(x)`` the
hat-function values of f's vertices, ``rho = 1 - sum lam`` and ``q`` on the
face of the containing cell opposite ``f``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn

from . import arith
from .mesh import LOCATE_TOL, PointLocationError
from .quadrature import simplex_rule


class SingularPointError(ValueError):
    """Polar coordinates requested at a point of ``f`` itself (rho_f = 0)."""


def slack(lam):
    """b(lam) = 1 - sum(lam) along the last axis."""
    lam = np.asarray(lam)
    return 1 - lam.sum(axis=-1)


def in_extended_simplex(lam, tol=0.0):
    lam = np.asarray(lam, dtype=float)
    return bool(np.all(lam >= -tol) and np.all(slack(lam) >= -tol))


def compose_weights(lam, mu):
    """lam + b(lam) mu: contracting by mu, then by lam, is contracting by this."""
    lam, mu = np.asarray(lam), np.asarray(mu)
    return lam + slack(lam)[..., None] * mu


def slack_power_integral(m, r):
    """Closed form of the integral of b(lam)^r over S_m^c, for r > -1.

    Equals |S_{m-1}^c| * Beta(r + 1, m + 1) with |S_{m-1}^c| = 1/m!.
    """
    if r <= -1:
        raise ValueError("the integral diverges for r <= -1")
    return float(beta_fn(r + 1, m + 1)) / np.prod(np.arange(1, m + 1), dtype=float)


# -- hat functions and lambda_f -------------------------------------------------

@lru_cache(maxsize=None)
def vertex_positions(mesh, f):
    """(ncells, m+1) position of each vertex of ``f`` in each cell, -1 if absent."""
    out = np.full((len(mesh.cells), len(f)), -1, dtype=int)
    for k, cell in enumerate(mesh.cells):
        for j, v in enumerate(f):
            if v in cell:
                out[k, j] = cell.index(v)
    out.flags.writeable = False
    return out


def lambda_from_bary(mesh, f, cells, bary):
    """lambda_f at points given by cell index and barycentric coordinates.

    Works in either arithmetic; absent vertices contribute exact zeros.
    """
    cells = np.asarray(cells, dtype=int)
    bary = np.atleast_2d(bary)
    pos = vertex_positions(mesh, tuple(f))[cells]
    rows = np.arange(len(cells))[:, None]
    lam = bary[rows, np.maximum(pos, 0)]
    zero = arith.zeros(lam.shape, arith.mode_of(bary))
    return np.where(pos >= 0, lam, zero)


def _locate(mesh, x, cells=None):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1 and mesh.dim > 1 or x.ndim == 0
    pts = x.reshape(-1, mesh.dim)
    if cells is None:
        cells, bary = mesh.locate(pts)
    else:
        cells = np.broadcast_to(np.asarray(cells, dtype=int), (len(pts),))
        bary = np.vstack([mesh.barycentric(int(c), p) for c, p in zip(cells, pts)])
        if np.any(bary < -LOCATE_TOL):
            raise PointLocationError("point outside its hinted cell")
    return single, pts, np.asarray(cells), bary


def hat_function(mesh, j, x, cells=None):
    """Continuous piecewise linear hat function of vertex ``j``, zero off its star."""
    single, _, cells, bary = _locate(mesh, x, cells)
    out = lambda_from_bary(mesh, (j,), cells, bary)[:, 0]
    return float(out[0]) if single else out


def lambda_f(mesh, f, x, cells=None):
    """(lam_{x_0}(x), ..., lam_{x_m}(x)) for the vertices of ``f``."""
    single, _, cells, bary = _locate(mesh, x, cells)
    out = lambda_from_bary(mesh, tuple(f), cells, bary)
    return out[0] if single else out


def rho_f(mesh, f, x, cells=None):
    """rho_f(x) = b(lambda_f(x)); zero exactly on ``f``, one off its extended macroelement."""
    lam = lambda_f(mesh, f, x, cells)
    out = slack(lam)
    return float(out) if np.ndim(out) == 0 else out


# -- contraction toward f -----------------------------------------------------

def contract(face_vertices, lam, y):
    """y + sum_j lam_j (x_j - y) for vertex coordinates ``face_vertices`` (m+1, n).

    Broadcasts over leading axes of ``lam`` (..., m+1) and ``y`` (..., n).
    """
    lam, y = np.asarray(lam), np.asarray(y)
    return slack(lam)[..., None] * y + lam @ np.asarray(face_vertices)


def contract_toward_face(mesh, f, lam, y, check=True):
    """Contraction of ``y`` toward ``f`` with weights ``lam`` in S_m^c.

    With ``check`` the point ``y`` must lie in the closed macroelement of
    ``f`` and ``lam`` in S_m^c.
    """
    f = tuple(f)
    lam = np.asarray(lam, dtype=float)
    if check:
        if lam.shape[-1] != len(f) or not in_extended_simplex(lam, 1e-14):
            raise ValueError(f"weights {lam.tolist()} are not in the extended simplex S_{len(f) - 1}^c")
        macro = set(mesh.cells_containing(f))
        for p in np.atleast_2d(np.asarray(y, dtype=float)):
            if not macro.intersection(mesh.containing_cells(p[None, :])[0]):
                raise PointLocationError(f"point {p.tolist()} is outside the macroelement of {f}")
    return contract(mesh.vertices[list(f)], lam, y)


# -- polar coordinates --------------------------------------------------------

@dataclass(frozen=True)
class PolarCoords:
    """x = sum_j lam_j x_j + b(lam) q, with q on the face of ``cell`` opposite f.

    ``q_bary`` are the barycentric coordinates of q in that face, in the
    vertex order of ``opposite``.
    """
    f: tuple
    cell: int
    lam: np.ndarray
    q: np.ndarray
    opposite: tuple
    q_bary: np.ndarray

    @property
    def rho(self):
        return float(slack(self.lam))


def polar_decompose(mesh, f, x, cell=None, tol=1e-12):
    """Generalized polar coordinates of ``x`` with respect to ``f``.

    ``x`` must lie in the macroelement of ``f``; the lowest-indexed cell
    of the macroelement containing it is used unless ``cell`` is given.
    """
    f = tuple(f)
    if len(f) - 1 >= mesh.dim:
        raise ValueError("polar coordinates need dim f < n")
    x = np.asarray(x, dtype=float)
    macro = mesh.cells_containing(f)
    if cell is None:
        hits = [c for c in mesh.containing_cells(x[None, :])[0] if c in macro]
        if not hits:
            raise PointLocationError(f"point {x.tolist()} is outside the macroelement of {f}")
        cell = int(hits[0])
    elif cell not in macro:
        raise ValueError(f"cell {cell} does not contain {f}")
    bary = mesh.barycentric(cell, x)
    verts = mesh.cells[cell]
    lam = np.array([bary[verts.index(v)] for v in f])
    rho = float(slack(lam))
    if rho <= tol:
        raise SingularPointError(f"point {x.tolist()} lies on {f}; rho_f vanishes")
    opposite = tuple(v for v in verts if v not in f)
    q_bary = np.array([bary[verts.index(v)] for v in opposite]) / rho
    q = q_bary @ mesh.vertices[list(opposite)]
    return PolarCoords(f, cell, lam, q, opposite, q_bary)


def polar_reconstruct(mesh, pc):
    return contract(mesh.vertices[list(pc.f)], pc.lam, pc.q)


def opposite_face(mesh, f, cell):
    return tuple(v for v in mesh.cells[cell] if v not in tuple(f))


def jacobian_factor(mesh, f, cell, q=None):
    """|det[x_0 - q, ..., x_m - q, Q]|, Q an orthonormal tangent basis of the opposite face.

    The value does not depend on where ``q`` sits in the opposite face;
    the face barycenter is used by default.
    """
    f = tuple(f)
    m, n = len(f) - 1, mesh.dim
    if m >= n:
        raise ValueError("the Jacobian factor needs dim f < n")
    if cell not in mesh.cells_containing(f):
        raise ValueError(f"cell {cell} does not contain {f}")
    opp = mesh.vertices[list(opposite_face(mesh, f, cell))]
    q = opp.mean(axis=0) if q is None else np.asarray(q, dtype=float)
    cols = [mesh.vertices[v] - q for v in f]
    if len(opp) > 1:
        basis, _ = np.linalg.qr((opp[1:] - opp[0]).T)
        cols += list(basis.T)
    return abs(float(np.linalg.det(np.column_stack(cols))))


def face_volume(points):
    """k-dimensional volume of the simplex spanned by (k+1, n) points; 1 for a point."""
    points = np.asarray(points, dtype=float)
    if len(points) == 1:
        return 1.0
    e = points[1:] - points[0]
    k = len(e)
    return float(np.sqrt(abs(np.linalg.det(e @ e.T)))) / float(np.prod(np.arange(1, k + 1)))


def polar_integral(mesh, f, phi, degree, cells=None):
    """Iterated integral over S_m^c x f*(T) of phi(lam, q) J b^(n-m-1), summed over cells.

    ``phi`` receives (P, m+1) weights and (P, n) points q. With ``degree``
    at least the polynomial degree of phi in (lam, q) plus n - m - 1 the
    result equals the integral of phi(lambda_f(x), q_f(x)) over the cells.
    For dim f = n - 1 the inner integral is a point evaluation.
    """
    f = tuple(f)
    m, n = len(f) - 1, mesh.dim
    cells = mesh.cells_containing(f) if cells is None else cells
    outer = simplex_rule(m + 1, degree)
    lam = outer.points[:, 1:]
    wl = outer.weights * slack(lam) ** (n - m - 1)
    inner = simplex_rule(n - m - 1, degree)
    total = 0.0
    for c in cells:
        opp = mesh.vertices[list(opposite_face(mesh, f, c))]
        q = inner.points @ opp
        wq = inner.weights * face_volume(opp) * float(np.prod(np.arange(1, n - m)))
        L = np.repeat(lam, len(q), axis=0)
        Q = np.tile(q, (len(lam), 1))
        vals = np.asarray(phi(L, Q), dtype=float)
        total += jacobian_factor(mesh, f, c) * float(np.outer(wl, wq).ravel() @ vals)
    return total
