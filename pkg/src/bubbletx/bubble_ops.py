"""Averaging, trace-preserving cut-off and their composite on a subsimplex.

For ``f`` of dimension ``m < n``:

* the face average ``A_f v(lam)`` is the mean over ``y`` in the
  macroelement of ``v(contract(lam, y))``;
* the cut-off ``K_m w(lam) = sum_I (-1)^|I| b(lam) / b(P_I lam) w(P_I lam)``
  keeps the trace of ``w`` on S_m and kills it on the other faces of S_m^c;
* the composite ``C_f v = (K_m A_f v)(lambda_f(.))`` is a mesh function
  supported in the extended macroelement.

For ``dim f = n`` the composite is restriction to the cell ``f``.

Every operator has an exact polynomial path (lattice values in, lattice
values out, float or rational) and a pointwise path for general functions.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from gmpy2 import mpq

from . import arith
from .arith import FLOAT
from .fe_space import (PiecewisePolynomial, SimplexPolynomial, boundary_lattice_of_top_face,
                       lagrange_basis, lattice_mean_weights, lattice_points, simplex_interpolation_matrix)
from .geometry import lambda_from_bary, slack, vertex_positions
from .quadrature import evaluate as evaluate_at, simplex_rule


class PreconditionError(ValueError):
    """A cut-off was requested for a function whose trace on S_m does not vanish on its boundary."""


class SingularPointError(ValueError):
    """A rational cut-off weight is 0/0 at the requested point."""


# -- index sets ---------------------------------------------------------------

@lru_cache(maxsize=None)
def index_subsets(m):
    """All subsets of {0, ..., m}, by size then lexicographically (2^(m+1) of them)."""
    return tuple(I for k in range(m + 2) for I in combinations(range(m + 1), k))


def project_index(I, lam):
    """Zero the coordinates of ``lam`` listed in ``I`` (last axis)."""
    out = np.array(lam, copy=True)
    if len(I):
        zero = mpq(0) if out.dtype == object else 0.0
        out[..., list(I)] = zero
    return out


def face_of_index(f, I):
    """The subface of ``f`` spanned by the vertices whose positions are not in ``I``."""
    return tuple(v for j, v in enumerate(f) if j not in I)


@dataclass(frozen=True)
class CutoffTerm:
    I: tuple
    sign: int
    face: tuple


@lru_cache(maxsize=None)
def cutoff_terms(f):
    """Signed terms of the cut-off for ``f``: index set, sign and subface."""
    f = tuple(f)
    return tuple(CutoffTerm(I, (-1) ** len(I), face_of_index(f, I)) for I in index_subsets(len(f) - 1))


# -- cached matrices ----------------------------------------------------------

def _embed(lam, pos, k):
    """Barycentric points in a k-simplex with ``lam`` at positions ``pos`` and zeros elsewhere."""
    out = arith.zeros((len(lam), k), arith.mode_of(lam))
    for j, p in enumerate(pos):
        out[:, p] = lam[:, j]
    return out


@lru_cache(maxsize=None)
def averaging_matrix(n, r, pos, mode):
    """Cell average of v(contract(lam, y)) at the extended-simplex nodes, from v's lattice values.

    ``pos`` are the positions of f's vertices in the cell's vertex tuple.
    For fixed lam the integrand has degree r in y, so the mean is exact
    with the degree-r lattice weights.
    """
    m = len(pos) - 1
    nodes = SimplexPolynomial.nodes(m, r, mode)
    gammas = lattice_points(n + 1, r, mode)
    w = lattice_mean_weights(n + 1, r, mode)
    b = slack(nodes)
    shift = _embed(nodes, pos, n + 1)
    pts = b[:, None, None] * gammas[None, :, :] + shift[:, None, :]
    basis = lagrange_basis(pts.reshape(-1, n + 1), r).reshape(len(nodes), len(gammas), -1)
    out = np.matmul(w, basis)
    if mode == FLOAT:
        out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def cutoff_matrix(m, r, mode):
    """Node values of K_m w from node values of w.

    Every node has positive coordinates, so b(P_I lam) > 0 for I nonempty.
    The I = {} term is w itself (this also covers nodes on S_m, where b = 0).
    """
    nodes = SimplexPolynomial.nodes(m, r, mode)
    out = arith.zeros((len(nodes), len(nodes)), mode)
    out[np.arange(len(nodes)), np.arange(len(nodes))] = 1
    b = slack(nodes)
    for I in index_subsets(m)[1:]:
        proj = project_index(I, nodes)
        ratio = b / slack(proj)
        out = out + (-1) ** len(I) * ratio[:, None] * simplex_interpolation_matrix(m, r, proj)
    if mode == FLOAT:
        out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def pullback_matrix(n, r, pos, mode):
    """Cell lattice values of w(lambda_f) from node values of w.

    ``pos[j]`` is the cell position of vertex j of f, or -1 when the
    vertex is not in the cell (its hat function vanishes there).
    """
    pts = lattice_points(n + 1, r, mode)
    lam = arith.zeros((len(pts), len(pos)), mode)
    for j, p in enumerate(pos):
        if p >= 0:
            lam[:, j] = pts[:, p]
    out = simplex_interpolation_matrix(len(pos) - 1, r, lam)
    if mode == FLOAT:
        out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def _boundary_check_matrix(m, r, mode):
    pts = boundary_lattice_of_top_face(m, r, mode)
    return pts, (simplex_interpolation_matrix(m, r, pts) if len(pts) else None)


# -- polynomial path ------------------------------------------------------------

def _positions(mesh, f, cell):
    return tuple(int(p) for p in vertex_positions(mesh, tuple(f))[cell])


def _weights(mesh, f, mode):
    cells = mesh.cells_containing(f)
    total = mesh.macro_volume(f, mode)
    return [(c, mesh.volume(c, mode) / total) for c in cells]


def average_values(space, f, values, cell=None):
    """Node values of A_f v (or of the single-cell average A_{f,T} v) from lattice values.

    ``values`` is (N,) or (N, K) for K functions at once.
    """
    f = tuple(f)
    mesh, r = space.mesh, space.degree
    m = len(f) - 1
    if not 0 <= m < mesh.dim:
        raise ValueError("the face average needs 0 <= dim f < n")
    mode = arith.mode_of(values)
    pairs = _weights(mesh, f, mode) if cell is None else [(cell, 1)]
    if cell is not None and cell not in mesh.cells_containing(f):
        raise ValueError(f"cell {cell} does not contain {f}")
    out = 0
    for c, weight in pairs:
        avg = averaging_matrix(mesh.dim, r, _positions(mesh, f, c), mode)
        out = out + weight * (avg @ values[space.cell_dofs[c]])
    return out


def average_poly(f, v, cell=None):
    """A_f v as a :class:`SimplexPolynomial` of degree r on S_m^c (exact for piecewise polynomials)."""
    return SimplexPolynomial(len(f) - 1, v.degree, average_values(v.space, f, v.values, cell))


def check_top_face_trace(m, r, values, tol=None, what="w"):
    """Raise unless the trace on S_m of the node-value polynomial(s) vanishes on the boundary of S_m."""
    pts, mat = _boundary_check_matrix(m, r, arith.mode_of(values))
    if mat is None:
        return
    trace = mat @ values
    if tol is None:
        tol = arith.zero_tolerance(values)
    bad = np.abs(arith.to_float(trace)) > tol if tol else np.array(
        [x != 0 for x in trace.ravel()]).reshape(trace.shape)
    if bad.any():
        i = np.argwhere(bad)[0]
        lam = "(" + ", ".join(str(x) for x in arith.fmt_array(pts[i[0]])) + ")"
        raise PreconditionError(
            f"trace of {what} on S_{m} is nonzero at boundary lattice point {lam}: "
            f"{arith.fmt(trace[tuple(i)])}")


def cutoff_values(m, r, values, tol=None, check=True):
    """Node values of K_m w from node values of w, after checking the trace precondition."""
    if check:
        check_top_face_trace(m, r, values, tol)
    return cutoff_matrix(m, r, arith.mode_of(values)) @ values


def cutoff_poly(w, tol=None):
    """K_m w for a :class:`SimplexPolynomial` ``w`` whose trace on S_m vanishes on its boundary."""
    return SimplexPolynomial(w.m, w.r, cutoff_values(w.m, w.r, w.values, tol))


def pullback_values(space, f, node_values):
    """Lattice values of w(lambda_f(.)) for node values of w on S_m^c.

    Points outside the extended macroelement have lambda_f = 0 and get w(0).
    """
    f = tuple(f)
    mesh, r = space.mesh, space.degree
    mode = arith.mode_of(node_values)
    m = len(f) - 1
    origin = simplex_interpolation_matrix(m, r, arith.zeros((1, m + 1), mode))[0] @ node_values
    out = arith.zeros((space.ndofs,) + np.shape(node_values)[1:], mode)
    out[...] = origin
    for c in mesh.macroelement(f).extended_cells:
        out[space.cell_dofs[c]] = pullback_matrix(mesh.dim, r, _positions(mesh, f, c), mode) @ node_values
    return out


def pullback(space, f, w):
    """The mesh function w(lambda_f(.)) for a :class:`SimplexPolynomial` ``w`` of degree <= r."""
    if w.r != space.degree:
        raise ValueError("degree mismatch")
    return PiecewisePolynomial(space, pullback_values(space, f, w.values))


def cf_values(space, f, values, tol=None, check=True):
    """Lattice values of C_f v from lattice values of v; (N,) or (N, K).

    For dim f < n the trace precondition of the cut-off is checked and a
    :class:`PreconditionError` raised when it fails. Entries outside the
    extended macroelement are exactly zero: K_m w vanishes at the origin
    for every w.
    """
    f = tuple(f)
    mesh, r = space.mesh, space.degree
    mode = arith.mode_of(values)
    m = len(f) - 1
    out = arith.zeros(values.shape, mode)
    if m == mesh.dim:
        idx = space.dofs_on(f)
        out[idx] = values[idx]
        return out
    w = average_values(space, f, values)
    if check:
        try:
            check_top_face_trace(m, r, w, tol, what=f"A_f v for f = {f}")
        except PreconditionError as err:
            raise PreconditionError(str(err)) from None
    kw = cutoff_matrix(m, r, mode) @ w
    for c in mesh.macroelement(f).extended_cells:
        out[space.cell_dofs[c]] = pullback_matrix(mesh.dim, r, _positions(mesh, f, c), mode) @ kw
    return out


def cf_poly(f, v, tol=None):
    """C_f v for a piecewise polynomial ``v``."""
    return PiecewisePolynomial(v.space, cf_values(v.space, f, v.values, tol))


# -- pointwise path -----------------------------------------------------------

def average_eval(mesh, f, v, lam, degree, cell=None):
    """A_f v(lam) by quadrature for a general ``v``; ``lam`` is (m+1,) or (L, m+1).

    ``v`` is a callable on (P, n) points or an object with
    ``evaluate_barycentric``. Contracted quadrature nodes stay in their
    cell, so evaluation is cell-aware. With ``cell`` the single-cell
    average A_{f,T} is returned. ``f = ()`` gives the plain mean.
    """
    f = tuple(f)
    n = mesh.dim
    lam = np.asarray(lam, dtype=float)
    single = lam.ndim == 1
    lam = lam[None, :] if single else lam
    rule = simplex_rule(n, degree)
    cells = mesh.cells_containing(f) if cell is None else (cell,)
    if cell is not None and cell not in mesh.cells_containing(f):
        raise ValueError(f"cell {cell} does not contain {f}")
    total_vol = sum(mesh.volumes[c] for c in cells)
    b = slack(lam)
    w = rule.weights / rule.weights.sum()
    out = np.zeros(len(lam))
    for c in cells:
        pos = _positions(mesh, f, c) if f else ()
        bary = b[:, None, None] * rule.points[None, :, :]
        for j, p in enumerate(pos):
            bary[:, :, p] += lam[:, j][:, None]
        vals = evaluate_at(v, mesh, np.full(bary.shape[0] * bary.shape[1], c),
                           bary.reshape(-1, n + 1)).reshape(len(lam), -1)
        out += mesh.volumes[c] / total_vol * (vals @ w)
    return out[0] if single else out


class FaceAverage:
    """The mesh function A_f v(lambda_f(.)) for a general ``v``, evaluated by quadrature."""

    def __init__(self, mesh, f, v, degree):
        self.mesh, self.f, self.v, self.degree = mesh, tuple(f), v, degree

    def evaluate_barycentric(self, cells, bary):
        lam = lambda_from_bary(self.mesh, self.f, cells, np.asarray(bary, dtype=float))
        return average_eval(self.mesh, self.f, self.v, lam, self.degree)


def cutoff_weights(lam):
    """(P, 2^(m+1)) signed weights (-1)^|I| b(lam)/b(P_I lam) of the cut-off terms.

    The I = {} weight is 1. A 0/0 weight (lam on a proper face of S_m) raises
    :class:`SingularPointError`; a 0/positive weight is 0.
    """
    lam = np.atleast_2d(lam)
    m = lam.shape[1] - 1
    b = slack(lam)
    subsets = index_subsets(m)
    out = np.empty((len(lam), len(subsets)), dtype=lam.dtype if lam.dtype == object else float)
    for k, I in enumerate(subsets):
        if not I:
            out[:, k] = 1
            continue
        bi = slack(project_index(I, lam))
        if any(x == 0 for x in bi):
            p = next(i for i, x in enumerate(bi) if x == 0)
            raise SingularPointError(f"cut-off weight 0/0 at lam = {arith.fmt_array(lam[p])}, I = {I}")
        out[:, k] = (-1) ** len(I) * b / bi
    return out


def cutoff_eval(w_eval, lam):
    """K_m w(lam) by the signed rational sum, for any evaluator ``w_eval`` on (P, m+1)."""
    lam = np.atleast_2d(lam)
    m = lam.shape[1] - 1
    weights = cutoff_weights(lam)
    total = 0
    for k, I in enumerate(index_subsets(m)):
        total = total + weights[:, k] * np.asarray(w_eval(project_index(I, lam)))
    return total


def cutoff_apply(mesh, f, w_eval, x, cells=None):
    """sum_I (-1)^|I| rho_f(x)/rho_{f(I)}(x) w(P_I lambda_f(x)) at physical points.

    ``w_eval`` maps (P, m+1) weights to values. Zero outside the extended
    macroelement (every term pairs off at the origin). ``cells`` optionally
    names the cell of each point.
    """
    from .geometry import lambda_f
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1 and mesh.dim > 1 or x.ndim == 0
    pts = x.reshape(-1, mesh.dim)
    lam = np.atleast_2d(lambda_f(mesh, tuple(f), pts, cells))
    out = np.zeros(len(pts))
    live = np.any(lam > 0, axis=1)
    if live.any():
        out[live] = cutoff_eval(w_eval, lam[live])
    return out[0] if single else out


def composite_eval(mesh, f, v, cells, bary, degree, cache=None):
    """C_f v at cell/barycentric points for a general ``v`` (pointwise, by quadrature).

    Points where some coordinate of lambda_f vanishes get exactly 0 (the
    cut-off terms pair off on every face {lam_i = 0}); the rest use the
    signed sum with quadrature averages. ``cache`` memoizes A_f v by lam.
    """
    f = tuple(f)
    n = mesh.dim
    cells = np.asarray(cells, dtype=int)
    bary = np.atleast_2d(np.asarray(bary, dtype=float))
    if len(f) - 1 == n:
        inside = np.array([mesh.cells[c] == f for c in cells])
        out = np.zeros(len(cells))
        if inside.any():
            out[inside] = evaluate_at(v, mesh, cells[inside], bary[inside])
        return out
    lam = lambda_from_bary(mesh, f, cells, bary)
    out = np.zeros(len(cells))
    live = np.all(lam > 0, axis=1)
    if not live.any():
        return out

    def avg(points):
        return _cached_average(mesh, f, v, points, degree, cache)

    out[live] = cutoff_eval(avg, lam[live])
    return out


def _cached_average(mesh, f, v, lam, degree, cache):
    if cache is None:
        return average_eval(mesh, f, v, lam, degree)
    keys = [row.tobytes() for row in lam]
    missing = [i for i, k in enumerate(keys) if k not in cache]
    if missing:
        vals = average_eval(mesh, f, v, lam[missing], degree)
        for i, val in zip(missing, vals):
            cache.setdefault(keys[i], float(val))
    return np.array([cache[k] for k in keys])
