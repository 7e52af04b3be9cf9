"""Local bubble projections and the degree-robust global projection built on the transform.

``local_project`` is the Galerkin projection onto the degree-r bubbles of
one macroelement, in the L2 or H1 inner product over that macroelement.
``global_projection`` sums the local projections of all transform
components, which reproduces every piecewise polynomial of degree r.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import arith
from .arith import FLOAT, RATIONAL
from .fe_space import FESpace, PiecewisePolynomial, lagrange_basis
from .quadrature import evaluate as evaluate_at, evaluate_gradient, simplex_rule
from .transform import transform_poly, transform_sampled, transform_values

INNER_PRODUCTS = ("l2", "h1")

#: largest space for the dense generalized eigenproblem
MAX_NORM_DOFS = 2000


class DimensionCapError(ValueError):
    """The space is too large for a dense eigensolve."""


def _check_inner(inner):
    if inner not in INNER_PRODUCTS:
        raise ValueError(f"unknown inner product {inner!r}; expected one of {INNER_PRODUCTS}")
    return inner


@dataclass(frozen=True)
class LocalBubbleBasis:
    """Nodal basis of the degree-r bubbles on the macroelement of ``f``.

    ``dofs`` are the domain points in the open macroelement; the nodal
    function of each is supported in the closed macroelement.
    """
    space: FESpace
    f: tuple
    dofs: np.ndarray

    @property
    def degree(self):
        return self.space.degree

    def __len__(self):
        return len(self.dofs)

    def function(self, i, mode=FLOAT):
        values = arith.zeros(self.space.ndofs, mode)
        values[self.dofs[i]] = 1
        return PiecewisePolynomial(self.space, values)

    def functions(self, mode=FLOAT):
        return [self.function(i, mode) for i in range(len(self))]


def local_bubble_basis(space, f):
    return LocalBubbleBasis(space, tuple(f), space.bubble_dofs(tuple(f)))


def _solve(gram, rhs, mode):
    if mode == RATIONAL:
        return arith.exact_solve(gram, rhs)
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), rhs)


def _quadrature_rhs(space, f, v, inner, degree):
    """<v, phi_i> over the macroelement for the bubble nodal functions, by quadrature."""
    mesh = space.mesh
    idx = space.bubble_dofs(f)
    where = {int(p): i for i, p in enumerate(idx)}
    rule = simplex_rule(mesh.dim, degree)
    rhs = np.zeros(len(idx))
    phi = lagrange_basis(rule.points, space.degree)
    if inner == "h1":
        from .fe_space import lagrange_basis_grad
        dphi = lagrange_basis_grad(rule.points, space.degree)
    for c in mesh.cells_containing(f):
        w = rule.weights * mesh.volumes[c] * math.factorial(mesh.dim)
        cells = np.full(len(w), c)
        vals = evaluate_at(v, mesh, cells, rule.points)
        if inner == "h1":
            grads = evaluate_gradient(v, mesh, cells, rule.points)
            lam_grad = mesh.barycentric_gradients(c)
        for a, p in enumerate(space.cell_dofs[c]):
            i = where.get(int(p))
            if i is None:
                continue
            rhs[i] += w @ (vals * phi[:, a])
            if inner == "h1":
                rhs[i] += w @ np.einsum("qd,qd->q", grads, dphi[:, a, :] @ lam_grad)
    return rhs


def local_project(space, f, v, inner="l2", degree=None, mode=None):
    """Projection of ``v`` onto the degree-r bubbles of the macroelement of ``f``.

    ``v`` is a :class:`PiecewisePolynomial` on ``space`` (projected exactly,
    in its own arithmetic) or any evaluator (float, by quadrature of
    exactness ``degree``, default 2r + 2). ``inner`` is ``"l2"`` or ``"h1"``
    over the macroelement.
    """
    f = tuple(f)
    _check_inner(inner)
    idx = space.bubble_dofs(f)
    cells = space.mesh.cells_containing(f)
    poly = isinstance(v, PiecewisePolynomial) and v.space is space
    if mode is None:
        mode = v.mode if poly else FLOAT
    if mode == RATIONAL and not poly:
        raise ValueError("rational projection needs a piecewise polynomial on the same space")
    gram = space.gram(inner, cells, mode)
    local = gram[np.ix_(idx, idx)]
    if poly:
        rhs = gram[idx] @ arith.convert(v.values, mode)
    else:
        rhs = _quadrature_rhs(space, f, v, inner, degree or 2 * space.degree + 2)
    out = arith.zeros(space.ndofs, mode)
    if len(idx):
        out[idx] = _solve(local, rhs, mode)
    return PiecewisePolynomial(space, out)


def orthogonality_residual(space, f, v, qv, inner="l2", degree=None):
    """max_i |<v - Qv, phi_i>| over the bubble basis (should vanish)."""
    idx = space.bubble_dofs(tuple(f))
    cells = space.mesh.cells_containing(tuple(f))
    mode = qv.mode
    gram = space.gram(inner, cells, mode)
    lhs = gram[idx] @ qv.values
    if isinstance(v, PiecewisePolynomial) and v.space is space:
        rhs = gram[idx] @ arith.convert(v.values, mode)
    else:
        rhs = _quadrature_rhs(space, tuple(f), v, inner, degree or 2 * space.degree + 2)
    diff = rhs - lhs
    return max((abs(x) for x in diff), default=0)


def global_projection(space, u, inner="l2", degree=None, sample_degree=20):
    """pi u = sum over all faces f of Q_f B_f u, a degree-r piecewise polynomial.

    A piecewise polynomial of degree <= r is raised to degree r and
    transformed exactly; anything else goes through the sampled transform
    with inner averages of exactness ``sample_degree`` and local
    projections by quadrature of exactness ``degree``.
    """
    _check_inner(inner)
    if isinstance(u, PiecewisePolynomial):
        if u.mesh is not space.mesh:
            raise ValueError("function lives on a different mesh")
        if u.degree > space.degree:
            raise ValueError("cannot project a higher-degree piecewise polynomial exactly")
        if u.degree < space.degree:
            u = PiecewisePolynomial(space, u.prolong(space.degree).values)
        elif u.space is not space:
            u = PiecewisePolynomial(space, u.values)
        dec = transform_poly(u)
    else:
        dec = transform_sampled(space.mesh, u, sample_degree)
    total = None
    for f, comp in dec.components.items():
        q = local_project(space, f, comp, inner, degree)
        total = q if total is None else total + q
    return total


# -- operator norms on the discrete space ------------------------------------------

def _transform_matrices(space):
    eye = np.eye(space.ndofs)
    comps, _ = transform_values(space, eye, check=True)
    return comps


def _local_projector(space, f, kind):
    """Matrix of Q_f acting on lattice values (full ndofs x ndofs)."""
    idx = space.bubble_dofs(f)
    gram = space.gram(kind, space.mesh.cells_containing(f), FLOAT)
    out = np.zeros((space.ndofs, space.ndofs))
    if len(idx):
        out[idx] = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram[np.ix_(idx, idx)]), gram[idx])
    return out


def operator_matrices(space, inner):
    """Per-face matrices of B_f and the matrix of pi (with local projections in ``inner``)."""
    comps = _transform_matrices(space)
    pi = sum(_local_projector(space, f, inner) @ c for f, c in comps.items())
    return comps, pi


def operator_norm_on_Pr(mesh, op, r, norm, inner=None):
    """Largest Rayleigh quotient of an operator on the degree-r space, in squared norms.

    For ``op="B"``: sup_u sum_f ||B_f u||^2_{Omega_f} / ||u||^2.
    For ``op="pi"``: sup_u ||pi u||^2 / ||u||^2, with local projections in
    ``inner`` (default: the same inner product as ``norm``).
    Solved as a dense generalized symmetric eigenproblem.
    """
    if op not in ("B", "pi"):
        raise ValueError(f"unknown operator {op!r}; expected 'B' or 'pi'")
    _check_inner(norm)
    space = FESpace(mesh, r)
    if space.ndofs > MAX_NORM_DOFS:
        raise DimensionCapError(f"{space.ndofs} degrees of freedom exceed the dense cap {MAX_NORM_DOFS}")
    gram = np.array(space.gram(norm))
    scipy.linalg.cholesky(gram)
    if op == "B":
        comps = _transform_matrices(space)
        lhs = np.zeros_like(gram)
        for f, c in comps.items():
            gf = space.gram(norm, mesh.cells_containing(f))
            lhs += c.T @ gf @ c
    else:
        _, pi = operator_matrices(space, _check_inner(inner or norm))
        lhs = pi.T @ gram @ pi
    lhs = 0.5 * (lhs + lhs.T)
    return float(scipy.linalg.eigh(lhs, gram, eigvals_only=True)[-1])
