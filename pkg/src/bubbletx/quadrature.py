"""Conical-product Gauss-Jacobi quadrature on simplices and mesh integrals.

All nodes are strictly interior, which the rho^{-2} weighted integrals
rely on.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from . import arith


@dataclass(frozen=True)
class QuadratureRule:
    """Rule on the reference simplex [0, e_1, ..., e_dim].

    ``points`` are barycentric (Q, dim+1); ``weights`` sum to 1/dim!.
    """
    dim: int
    degree: int
    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    @property
    def cartesian(self):
        return self.points[:, 1:]


def _gauss_jacobi01(k, alpha):
    """k-point rule for int_0^1 g(t) (1-t)^alpha dt."""
    s, w = roots_jacobi(k, alpha, 0.0)
    return (s + 1.0) / 2.0, w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=None)
def simplex_rule(dim, degree):
    """Conical-product rule of exactness ``degree`` on the ``dim``-simplex.

    Collapsed coordinates x_1 = t_1, x_2 = t_2 (1 - t_1), ... turn the
    simplex into a cube; direction i carries the Jacobi weight
    (1 - t_i)^(dim - i).
    """
    if dim not in (0, 1, 2, 3):
        raise ValueError(f"unsupported simplex dimension {dim}")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if dim == 0:
        return QuadratureRule(0, degree, np.ones((1, 1)), np.ones(1))
    k = degree // 2 + 1
    rules = [_gauss_jacobi01(k, dim - 1 - i) for i in range(dim)]
    grids = np.meshgrid(*[t for t, _ in rules], indexing="ij")
    wgrid = np.meshgrid(*[w for _, w in rules], indexing="ij")
    t = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    x = np.empty_like(t)
    scale = np.ones(len(t))
    for i in range(dim):
        x[:, i] = t[:, i] * scale
        scale = scale * (1.0 - t[:, i])
    bary = np.hstack([1.0 - x.sum(axis=1, keepdims=True), x])
    bary.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(dim, degree, bary, weights)


def monomial_integral(exponents):
    """Exact integral of prod x_i^a_i over the reference simplex: prod a_i! / (|a| + n)!."""
    n = len(exponents)
    return math.prod(math.factorial(a) for a in exponents) / math.factorial(sum(exponents) + n)


def cell_nodes(mesh, cell, rule):
    """Physical nodes and weights of ``rule`` mapped to ``cell``."""
    x = mesh.vertices[list(mesh.cells[cell])]
    scale = mesh.volumes[cell] * math.factorial(mesh.dim)
    return rule.points @ x, rule.weights * scale


def evaluate(v, mesh, cells, bary):
    """Evaluate ``v`` at points given by cell and barycentric coordinates.

    Objects exposing ``evaluate_barycentric`` (piecewise polynomials,
    sampled transform components) are evaluated cell-aware; plain
    callables receive the (P, n) physical points.
    """
    cells = np.asarray(cells, dtype=int)
    if hasattr(v, "evaluate_barycentric"):
        return np.asarray(v.evaluate_barycentric(cells, bary), dtype=float)
    pts = np.einsum("pk,pkd->pd", bary, mesh.vertices[np.array(mesh.cells)[cells]])
    out = np.asarray(v(pts), dtype=float)
    return np.broadcast_to(out, (len(pts),)).copy() if out.ndim == 0 else out


def evaluate_gradient(v, mesh, cells, bary, grad=None):
    cells = np.asarray(cells, dtype=int)
    if grad is None and hasattr(v, "gradient_barycentric"):
        return np.asarray(v.gradient_barycentric(cells, bary), dtype=float)
    if grad is None:
        raise TypeError("an H1 norm of a plain callable needs its gradient (grad=...)")
    pts = np.einsum("pk,pkd->pd", bary, mesh.vertices[np.array(mesh.cells)[cells]])
    return np.asarray(grad(pts), dtype=float).reshape(len(pts), mesh.dim)


def _default_degree(v, degree):
    if degree is not None:
        return degree
    r = getattr(v, "degree", None)
    if r is None:
        raise ValueError("quadrature degree required for a general evaluator")
    return 2 * r + 2


def _cell_batch(mesh, cells, rule):
    cells = range(len(mesh.cells)) if cells is None else cells
    cells = np.asarray(list(cells), dtype=int)
    q = len(rule)
    cell_idx = np.repeat(cells, q)
    bary = np.tile(rule.points, (len(cells), 1))
    w = np.concatenate([rule.weights * mesh.volumes[c] * math.factorial(mesh.dim) for c in cells])
    return cell_idx, bary, w


def integrate(v, mesh, cells=None, degree=None):
    """Integral of ``v`` over the given cells (default: the whole mesh)."""
    rule = simplex_rule(mesh.dim, _default_degree(v, degree))
    cell_idx, bary, w = _cell_batch(mesh, cells, rule)
    return float(w @ evaluate(v, mesh, cell_idx, bary))


def norm_l2(v, mesh, cells=None, degree=None):
    """L2 norm over the given cells, by quadrature."""
    rule = simplex_rule(mesh.dim, _default_degree(v, degree))
    cell_idx, bary, w = _cell_batch(mesh, cells, rule)
    vals = evaluate(v, mesh, cell_idx, bary)
    return math.sqrt(float(w @ vals ** 2))


def seminorm_h1(v, mesh, cells=None, degree=None, grad=None):
    rule = simplex_rule(mesh.dim, _default_degree(v, degree))
    cell_idx, bary, w = _cell_batch(mesh, cells, rule)
    g = evaluate_gradient(v, mesh, cell_idx, bary, grad)
    return math.sqrt(float(w @ (g ** 2).sum(axis=1)))


def norm_h1(v, mesh, cells=None, degree=None, grad=None):
    """Full H1 norm, sqrt(||v||_0^2 + ||grad v||_0^2)."""
    return math.hypot(norm_l2(v, mesh, cells, degree), seminorm_h1(v, mesh, cells, degree, grad))


def macro_cells(mesh, f):
    return mesh.cells_containing(tuple(f))


def rho_at(mesh, f, cells, bary):
    """rho_f = 1 - sum of the barycentric coordinates of f's vertices."""
    from .geometry import lambda_from_bary, slack
    return slack(lambda_from_bary(mesh, tuple(f), cells, bary))


def weighted_decay_integral(mesh, f, w, degree):
    """Integral over the domain of rho_f^{-2} |w|^2 with interior-node quadrature."""
    rule = simplex_rule(mesh.dim, degree)
    cell_idx, bary, weights = _cell_batch(mesh, None, rule)
    rho = rho_at(mesh, tuple(f), cell_idx, bary)
    if np.any(rho <= 0):
        raise ValueError("quadrature node on the subsimplex; rho_f vanishes")
    vals = evaluate(w, mesh, cell_idx, bary)
    return float(weights @ (vals / rho) ** 2)


def exact_integral(u, cells=None):
    """Exact integral of a piecewise polynomial from its Bernstein coefficients.

    Each degree-r Bernstein polynomial integrates to |T| / C(r + n, n).
    """
    mesh = u.mesh
    cells = range(len(mesh.cells)) if cells is None else cells
    nb = u.space.local_size
    total = 0
    for c in cells:
        total = total + mesh.volume(c, u.mode) * u.bernstein(c).sum()
    return total / (nb if u.mode == arith.FLOAT else arith.rational(nb))
