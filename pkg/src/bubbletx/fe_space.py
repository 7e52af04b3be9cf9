"""Continuous piecewise polynomials stored as values on the principal lattice.

A degree-r function on the mesh is the vector of its values at the mesh
domain points (the order-r lattice of every cell, shared points stored
once). Continuity is therefore structural, and traces or zero-trace tests
are index selections. Each cell also has a Bernstein view, used for
evaluation by de Casteljau's algorithm and for exact integration.

Functions on the extended simplex ``S_m^c`` are :class:`SimplexPolynomial`,
stored at a shifted lattice whose nodes all have strictly positive
coordinates.
"""
import json
import math
from functools import cached_property, lru_cache

import numpy as np
from gmpy2 import mpq

from . import arith
from .arith import FLOAT, RATIONAL


# -- lattices and local bases ------------------------------------------------

@lru_cache(maxsize=None)
def multi_indices(k, r):
    """All k-tuples of nonnegative integers summing to r, starting at (r, 0, ..., 0)."""
    if k == 1:
        return ((r,),)
    return tuple((a,) + rest for a in range(r, -1, -1) for rest in multi_indices(k - 1, r - a))


def lattice_points(k, r, mode=FLOAT):
    """Barycentric coordinates alpha / r of the order-r lattice, shape (nb, k)."""
    idx = np.array(multi_indices(k, r), dtype=int)
    if mode == RATIONAL:
        return arith.exact_array(idx) / r
    return idx / r


def _ones(shape, like):
    if np.asarray(like).dtype == object:
        out = np.empty(shape, dtype=object)
        out.fill(mpq(1))
        return out
    return np.ones(shape)


def _as_points(bary):
    bary = np.atleast_2d(bary)
    return bary if bary.dtype == object else bary.astype(float)


def _factor_table(bary, r):
    """F[i][s] = prod_{t<s} (r*lam_i - t) / (t + 1), and its derivative in lam_i."""
    P, k = bary.shape
    F, dF = [], []
    for i in range(k):
        lam = bary[:, i]
        f = [_ones(P, bary)]
        df = [0 * f[0]]
        for s in range(1, r + 1):
            df.append((df[-1] * (r * lam - (s - 1)) + f[-1] * r) / s)
            f.append(f[-1] * (r * lam - (s - 1)) / s)
        F.append(f)
        dF.append(df)
    return F, dF


def lagrange_basis(bary, r):
    """Nodal basis of the order-r lattice evaluated at barycentric points.

    ``bary`` is (P, k); returns (P, nb) in the order of ``multi_indices(k, r)``.
    Works for float and exact (object) input alike.
    """
    bary = _as_points(bary)
    P, k = bary.shape
    F, _ = _factor_table(bary, r)
    idx = multi_indices(k, r)
    out = np.empty((P, len(idx)), dtype=bary.dtype if bary.dtype == object else float)
    for a, alpha in enumerate(idx):
        val = F[0][alpha[0]]
        for i in range(1, k):
            val = val * F[i][alpha[i]]
        out[:, a] = val
    return out


def lagrange_basis_grad(bary, r):
    """Partial derivatives of the nodal basis in the barycentric variables, (P, nb, k)."""
    bary = _as_points(bary)
    P, k = bary.shape
    F, dF = _factor_table(bary, r)
    idx = multi_indices(k, r)
    out = np.empty((P, len(idx), k), dtype=bary.dtype if bary.dtype == object else float)
    for a, alpha in enumerate(idx):
        for i in range(k):
            val = dF[i][alpha[i]]
            for j in range(k):
                if j != i:
                    val = val * F[j][alpha[j]]
            out[:, a, i] = val
    return out


def bernstein_basis(bary, r):
    """Bernstein polynomials r!/beta! * lam^beta at barycentric points, (P, nb)."""
    bary = _as_points(bary)
    P, k = bary.shape
    idx = multi_indices(k, r)
    out = np.empty((P, len(idx)), dtype=bary.dtype if bary.dtype == object else float)
    for a, beta in enumerate(idx):
        coef = math.factorial(r)
        val = _ones(P, bary)
        for i, b in enumerate(beta):
            coef //= math.factorial(b)
            val = val * bary[:, i] ** b
        out[:, a] = coef * val
    return out


@lru_cache(maxsize=None)
def _exact_lattice_to_bernstein(k, r):
    return arith.exact_inverse(bernstein_basis(lattice_points(k, r, RATIONAL), r))


@lru_cache(maxsize=None)
def _float_lattice_to_bernstein(k, r):
    return np.linalg.inv(bernstein_basis(lattice_points(k, r), r))


def lattice_to_bernstein(k, r, mode=FLOAT):
    """Matrix mapping lattice values to Bernstein coefficients."""
    if mode == RATIONAL:
        return _exact_lattice_to_bernstein(k, r)
    return _float_lattice_to_bernstein(k, r)


@lru_cache(maxsize=None)
def _mean_weights(k, r, mode):
    c2l = lattice_to_bernstein(k, r, mode)
    w = c2l.sum(axis=0)
    return w / len(w) if mode == FLOAT else w / mpq(len(w))


def lattice_mean_weights(k, r, mode=FLOAT):
    """Weights w with  mean over the simplex of p  =  w @ (lattice values of p),  deg p <= r.

    Every Bernstein polynomial of degree r has the same mean 1/nb, so the
    weights are the column sums of the lattice-to-Bernstein map over nb.
    """
    return _mean_weights(k, r, mode)


def de_casteljau(coeffs, bary, r):
    """Evaluate a Bernstein expansion at (P, k) barycentric points."""
    bary = np.atleast_2d(bary)
    k = bary.shape[1]
    level = dict(zip(multi_indices(k, r), coeffs))
    for s in range(r, 0, -1):
        new = {}
        for g in multi_indices(k, s - 1):
            acc = 0
            for i in range(k):
                acc = acc + bary[:, i] * level[g[:i] + (g[i] + 1,) + g[i + 1:]]
            new[g] = acc
        level = new
    out = level[(0,) * k]
    return out * _ones(bary.shape[0], bary) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def _reference_mass(k, r, mode):
    if mode == RATIONAL:
        pts = lattice_points(k, 2 * r, RATIONAL)
        w = lattice_mean_weights(k, 2 * r, RATIONAL)
    else:
        from .quadrature import simplex_rule
        rule = simplex_rule(k - 1, 2 * r)
        pts, w = rule.points, rule.weights / rule.weights.sum()
    phi = lagrange_basis(pts, r)
    return (phi * w[:, None]).T @ phi


@lru_cache(maxsize=None)
def _reference_stiffness(k, r, mode):
    """S[i, j] = mean of d_i phi_a * d_j phi_b over the simplex (barycentric partials)."""
    deg = max(2 * r - 2, 1)
    if mode == RATIONAL:
        pts = lattice_points(k, deg, RATIONAL)
        w = lattice_mean_weights(k, deg, RATIONAL)
    else:
        from .quadrature import simplex_rule
        rule = simplex_rule(k - 1, deg)
        pts, w = rule.points, rule.weights / rule.weights.sum()
    g = lagrange_basis_grad(pts, r)
    nb = g.shape[1]
    out = np.empty((k, k, nb, nb), dtype=g.dtype)
    for i in range(k):
        for j in range(k):
            out[i, j] = (g[:, :, i] * w[:, None]).T @ g[:, :, j]
    return out


# -- the global space ---------------------------------------------------------

class FESpace:
    """Continuous piecewise polynomials of degree ``degree`` on ``mesh``.

    Domain point ``p`` is keyed by the pairs (vertex, multiplicity) with
    nonzero multiplicity; its support ``supports[p]`` is the subsimplex in
    whose relative interior it lies.
    """

    def __init__(self, mesh, degree):
        if degree < 1:
            raise ValueError("degree must be >= 1")
        self.mesh = mesh
        self.degree = r = int(degree)
        k = mesh.dim + 1
        self.local_indices = multi_indices(k, r)
        keys, supports = {}, []
        cell_dofs = np.empty((len(mesh.cells), len(self.local_indices)), dtype=int)
        for c, cell in enumerate(mesh.cells):
            for a, alpha in enumerate(self.local_indices):
                key = tuple((cell[i], alpha[i]) for i in range(k) if alpha[i] > 0)
                if key not in keys:
                    keys[key] = len(keys)
                    supports.append(tuple(v for v, _ in key))
                cell_dofs[c, a] = keys[key]
        cell_dofs.flags.writeable = False
        self.keys = tuple(keys)
        self.supports = tuple(supports)
        self.cell_dofs = cell_dofs
        self._index = keys

    def __repr__(self):
        return f"FESpace(degree={self.degree}, ndofs={self.ndofs}, mesh={self.mesh!r})"

    @property
    def ndofs(self):
        return len(self.keys)

    @property
    def local_size(self):
        return len(self.local_indices)

    @cached_property
    def points(self):
        x = np.zeros((self.ndofs, self.mesh.dim))
        for p, key in enumerate(self.keys):
            for v, a in key:
                x[p] += a * self.mesh.vertices[v]
        return x / self.degree

    @cached_property
    def exact_points(self):
        x = arith.zeros((self.ndofs, self.mesh.dim), RATIONAL)
        for p, key in enumerate(self.keys):
            for v, a in key:
                x[p] = x[p] + a * self.mesh.exact_vertices[v]
        return x / mpq(self.degree)

    def dof(self, key):
        return self._index[tuple(key)]

    @lru_cache(maxsize=None)
    def dofs_on(self, f):
        """Domain points in the closed subsimplex ``f``."""
        fs = set(f)
        return np.array([p for p, s in enumerate(self.supports) if fs.issuperset(s)], dtype=int)

    @lru_cache(maxsize=None)
    def dofs_interior(self, f):
        """Domain points in the relative interior of ``f``."""
        f = tuple(f)
        return np.array([p for p, s in enumerate(self.supports) if s == f], dtype=int)

    @lru_cache(maxsize=None)
    def bubble_dofs(self, f):
        """Domain points of the open macroelement of ``f`` (relative to the domain).

        A point qualifies when every cell containing its support simplex
        contains ``f``; the nodal functions at these points span the
        functions supported in the macroelement.
        """
        macro = set(self.mesh.cells_containing(tuple(f)))
        return np.array([p for p, s in enumerate(self.supports)
                         if set(self.mesh.cells_containing(s)) <= macro], dtype=int)

    @lru_cache(maxsize=None)
    def exterior_dofs(self, f):
        inside = np.zeros(self.ndofs, dtype=bool)
        inside[self.bubble_dofs(tuple(f))] = True
        return np.flatnonzero(~inside)

    @lru_cache(maxsize=None)
    def face_dofs(self, f):
        """Global indices of the closed-face lattice of ``f``, ordered by
        ``multi_indices(len(f), degree)`` in the vertex order of ``f``."""
        f = tuple(f)
        cell = self.mesh.cells_containing(f)[0]
        pos = [self.mesh.cells[cell].index(v) for v in f]
        local = {alpha: a for a, alpha in enumerate(self.local_indices)}
        out = []
        for gamma in multi_indices(len(f), self.degree):
            alpha = [0] * (self.mesh.dim + 1)
            for j, g in zip(pos, gamma):
                alpha[j] = g
            out.append(self.cell_dofs[cell, local[tuple(alpha)]])
        return np.array(out, dtype=int)

    # -- Gram matrices --------------------------------------------------------

    def element_matrix(self, cell, kind, mode=FLOAT):
        k = self.mesh.dim + 1
        vol = self.mesh.volume(cell, mode)
        mat = vol * arith.convert(_reference_mass(k, self.degree, mode), mode)
        if kind == "l2":
            return mat
        if kind != "h1":
            raise ValueError(f"unknown inner product {kind!r}")
        grads = self.mesh.barycentric_gradients(cell, mode)
        metric = grads @ grads.T
        parts = _reference_stiffness(k, self.degree, mode)
        stiff = sum(metric[i, j] * parts[i, j] for i in range(k) for j in range(k))
        return mat + vol * stiff

    @lru_cache(maxsize=None)
    def gram(self, kind="l2", cells=None, mode=FLOAT):
        """Global Gram matrix of the nodal basis over ``cells`` (default: all)."""
        cells = range(len(self.mesh.cells)) if cells is None else cells
        out = arith.zeros((self.ndofs, self.ndofs), mode)
        for c in cells:
            d = self.cell_dofs[c]
            out[np.ix_(d, d)] += self.element_matrix(c, kind, mode)
        if mode == FLOAT:
            out.flags.writeable = False
        return out

    def macro_gram(self, f, kind="l2", mode=FLOAT):
        return self.gram(kind, self.mesh.cells_containing(tuple(f)), mode)


# -- piecewise polynomials ----------------------------------------------------

class PiecewisePolynomial:
    """An element of the continuous degree-r space, as lattice values.

    ``values`` is a float64 vector or an object vector of exact rationals;
    the arithmetic mode follows from it.
    """

    def __init__(self, space, values):
        values = np.array(values, dtype=object if np.asarray(values).dtype == object else float)
        if values.shape != (space.ndofs,):
            raise ValueError(f"expected {space.ndofs} lattice values, got shape {values.shape}")
        if values.dtype == object:
            values = arith.exact_array(values)
        values.flags.writeable = False
        self.space = space
        self.values = values

    def __repr__(self):
        return f"PiecewisePolynomial(degree={self.degree}, mode={self.mode!r}, ndofs={len(self.values)})"

    @property
    def degree(self):
        return self.space.degree

    @property
    def mesh(self):
        return self.space.mesh

    @property
    def mode(self):
        return arith.mode_of(self.values)

    def _wrap(self, values):
        return PiecewisePolynomial(self.space, values)

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("operands live on different spaces")

    def __add__(self, other):
        self._check(other)
        return self._wrap(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self._wrap(self.values - other.values)

    def __neg__(self):
        return self._wrap(-self.values)

    def __mul__(self, scalar):
        if self.mode == RATIONAL:
            scalar = arith.rational(scalar)
        return self._wrap(self.values * scalar)

    __rmul__ = __mul__

    def astype(self, mode):
        return self._wrap(arith.convert(self.values, mode))

    def max_abs(self):
        return max((abs(x) for x in self.values), default=0)

    def cell_values(self, cell):
        return self.values[self.space.cell_dofs[cell]]

    def bernstein(self, cell):
        """Bernstein coefficients of the restriction to ``cell``."""
        k = self.mesh.dim + 1
        return lattice_to_bernstein(k, self.degree, self.mode) @ self.cell_values(cell)

    def evaluate_barycentric(self, cells, bary):
        """Values at points given by cell index and barycentric coordinates there."""
        cells = np.asarray(cells, dtype=int)
        bary = np.atleast_2d(bary)
        exact = bary.dtype == object and self.mode == RATIONAL
        vals = self.values if exact else arith.to_float(self.values)
        basis = lagrange_basis(bary if exact else arith.to_float(bary), self.degree)
        return np.einsum("pa,pa->p", basis, vals[self.space.cell_dofs[cells]]) if not exact else \
            np.array([basis[p] @ vals[self.space.cell_dofs[c]] for p, c in enumerate(cells)],
                     dtype=object)

    def evaluate(self, x):
        """Point values by de Casteljau on the containing cell (float result)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1 and self.mesh.dim > 1 or x.ndim == 0
        pts = x.reshape(-1, self.mesh.dim)
        cells, bary = self.mesh.locate(pts)
        out = np.empty(len(pts))
        k = self.mesh.dim + 1
        c2b = lattice_to_bernstein(k, self.degree, FLOAT)
        vals = arith.to_float(self.values)
        for c in np.unique(cells):
            mask = cells == c
            coeffs = c2b @ vals[self.space.cell_dofs[c]]
            out[mask] = de_casteljau(coeffs, bary[mask], self.degree)
        return out[0] if single else out

    def __call__(self, x):
        return self.evaluate(x)

    def gradient_barycentric(self, cells, bary):
        cells = np.asarray(cells, dtype=int)
        bary = arith.to_float(np.atleast_2d(bary))
        g = lagrange_basis_grad(bary, self.degree)
        vals = arith.to_float(self.values)[self.space.cell_dofs[cells]]
        dlam = np.einsum("pak,pa->pk", g, vals)
        out = np.empty((len(cells), self.mesh.dim))
        for c in np.unique(cells):
            mask = cells == c
            out[mask] = dlam[mask] @ self.mesh.barycentric_gradients(c)
        return out

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1 and self.mesh.dim > 1 or x.ndim == 0
        pts = x.reshape(-1, self.mesh.dim)
        cells, bary = self.mesh.locate(pts)
        out = self.gradient_barycentric(cells, bary)
        return out[0] if single else out

    def prolong(self, degree):
        """The same function as an element of the degree-``degree`` space."""
        if degree < self.degree:
            raise ValueError("can only raise the degree")
        target = FESpace(self.mesh, degree)
        k = self.mesh.dim + 1
        mode = self.mode
        pts = lattice_points(k, degree, mode)
        basis = lagrange_basis(pts, self.degree)
        values = arith.zeros(target.ndofs, mode)
        for c in range(len(self.mesh.cells)):
            values[target.cell_dofs[c]] = basis @ self.cell_values(c)
        return PiecewisePolynomial(target, values)

    def to_dict(self):
        return {
            "degree": self.degree,
            "mode": self.mode,
            "points": self.space.points.tolist(),
            "values": arith.fmt_array(self.values),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, space, data):
        if data["degree"] != space.degree:
            raise ValueError("degree mismatch")
        pts = np.asarray(data["points"], dtype=float)
        if pts.shape != space.points.shape or not np.allclose(pts, space.points, atol=1e-12):
            raise ValueError("lattice points do not match the space")
        raw = data["values"]
        if data.get("mode", FLOAT) == RATIONAL:
            return cls(space, arith.exact_array(raw))
        return cls(space, np.asarray(raw, dtype=float))


def interpolate(space, func, mode=FLOAT):
    """Lattice interpolant of ``func``, called on the (N, n) array of domain points.

    In rational mode ``func`` receives exact coordinates and must return
    exact values (e.g. a polynomial with rational coefficients).
    """
    arith.check_mode(mode)
    pts = space.exact_points if mode == RATIONAL else space.points
    vals = np.asarray(func(pts))
    if vals.shape == ():
        vals = np.full(space.ndofs, vals.item(), dtype=vals.dtype)
    return PiecewisePolynomial(space, vals if mode == FLOAT else arith.exact_array(vals))


def random_element(space, seed, mode=FLOAT):
    """I.i.d. uniform(-1, 1) lattice values on the dyadic grid k/1024.

    Both modes draw the identical numbers, so float and rational runs of
    the same seed see the same input.
    """
    rng = np.random.default_rng(seed)
    k = rng.integers(-1023, 1024, size=space.ndofs)
    if mode == RATIONAL:
        return PiecewisePolynomial(space, np.array([mpq(int(i), 1024) for i in k], dtype=object))
    return PiecewisePolynomial(space, k / 1024.0)


def trace(u, f):
    """Lattice values of the restriction of ``u`` to the closed subsimplex ``f``."""
    return u.values[u.space.face_dofs(tuple(f))]


def is_in_zero_trace_space(u, f, tol=None):
    """Whether ``u`` vanishes identically outside the open macroelement of ``f``."""
    outside = u.values[u.space.exterior_dofs(tuple(f))]
    if tol is None:
        tol = arith.zero_tolerance(u.values)
    return all(abs(x) <= tol for x in outside)


def face_measure(mesh, f):
    """m-dimensional measure of the subsimplex ``f`` (1 for a vertex)."""
    x = mesh.vertices[list(f)]
    e = x[1:] - x[0]
    return math.sqrt(abs(np.linalg.det(e @ e.T))) / math.factorial(len(f) - 1) if len(f) > 1 else 1.0


def dof_averages(u, f):
    """Averages over ``f`` of u * lam^beta, |beta| = r - 1 - dim f (lam: barycentrics of f).

    For a vertex this is the point value. The monomials lam^beta span
    P_{r-1-dim f}(f). Exact in rational mode.
    """
    f = tuple(f)
    m, r = len(f) - 1, u.degree
    q = r - 1 - m
    if m == 0:
        return u.values[u.space.face_dofs(f)]
    if q < 0:
        return arith.zeros(0, u.mode)
    coeffs = lattice_to_bernstein(m + 1, r, u.mode) @ trace(u, f)
    gammas = multi_indices(m + 1, r)
    out = arith.zeros(len(multi_indices(m + 1, q)), u.mode)
    for b, beta in enumerate(multi_indices(m + 1, q)):
        acc = 0
        for c, gamma in zip(coeffs, gammas):
            # mean of lam^delta over an m-simplex is m! delta! / (|delta| + m)!
            num = math.factorial(r) * math.factorial(m)
            for g, bb in zip(gamma, beta):
                num = num * math.factorial(g + bb) // math.factorial(g)
            weight = mpq(num, math.factorial(r + q + m))
            acc = acc + c * (weight if u.mode == RATIONAL else float(weight))
        out[b] = acc
    return out


def dof_moments(u, f):
    """Moments of ``u`` against a basis of P_{r-1-dim f}(f); point value for a vertex."""
    avg = arith.to_float(dof_averages(u, f))
    return avg if len(f) == 1 else avg * face_measure(u.mesh, f)


def dof_matrix(space, mode=FLOAT):
    """All moment functionals applied to all nodal basis functions (square)."""
    rows = []
    for f in space.mesh.all_subsimplexes():
        cols = []
        for p in range(space.ndofs):
            e = arith.zeros(space.ndofs, mode)
            e[p] = 1 if mode == FLOAT else mpq(1)
            cols.append(dof_averages(PiecewisePolynomial(space, e), f))
        if cols[0].size:
            rows.append(np.stack(cols, axis=1))
    return np.vstack(rows)


# -- polynomials on the extended simplex ---------------------------------------

@lru_cache(maxsize=None)
def _simplex_nodes(m, r, mode):
    idx = np.array(multi_indices(m + 2, r), dtype=int)[:, 1:]
    if mode == RATIONAL:
        return (2 * arith.exact_array(idx) + 1) / mpq(2 * r + m + 1)
    return (2 * idx + 1) / (2 * r + m + 1)


def simplex_interpolation_matrix(m, r, lam):
    """Nodal basis of :class:`SimplexPolynomial` evaluated at points ``lam`` (P, m+1)."""
    lam = np.atleast_2d(lam)
    exact = lam.dtype == object
    scale = mpq(2 * r + m + 1) if exact else 2 * r + m + 1
    mu = (lam * scale - 1) / (mpq(2 * r) if exact else 2 * r)
    bary = np.hstack([1 - mu.sum(axis=1, keepdims=True), mu])
    return lagrange_basis(bary, r)


class SimplexPolynomial:
    """A polynomial of degree <= r on S_m^c = {lam in R^{m+1}: lam >= 0, sum lam <= 1}.

    Stored by its values at the nodes lam_i = (alpha_i + 1/2) / (r + (m+1)/2),
    |alpha| <= r, an affine image of the principal lattice with every
    coordinate positive.
    """

    def __init__(self, m, r, values):
        self.m, self.r = int(m), int(r)
        values = np.asarray(values)
        if values.shape[:1] != (len(multi_indices(m + 2, r)),):
            raise ValueError("wrong number of node values")
        self.values = arith.exact_array(values) if values.dtype == object else values.astype(float)

    def __repr__(self):
        return f"SimplexPolynomial(m={self.m}, r={self.r}, mode={self.mode!r})"

    @property
    def mode(self):
        return arith.mode_of(self.values)

    @staticmethod
    def nodes(m, r, mode=FLOAT):
        return _simplex_nodes(m, r, mode)

    @classmethod
    def from_function(cls, m, r, func, mode=FLOAT):
        """Interpolate ``func`` (called on the (P, m+1) node array) at the nodes."""
        return cls(m, r, np.asarray(func(cls.nodes(m, r, mode))))

    def evaluate(self, lam):
        lam = np.asarray(lam)
        single = lam.ndim == 1
        if self.mode == FLOAT or lam.dtype != object:
            lam = arith.to_float(lam)
            vals = arith.to_float(self.values)
        else:
            vals = self.values
        out = simplex_interpolation_matrix(self.m, self.r, np.atleast_2d(lam)) @ vals
        return out[0] if single else out

    def __call__(self, lam):
        return self.evaluate(lam)

    def trace_boundary_values(self):
        """Values at the lattice points of the relative boundary of S_m (exact when possible)."""
        pts = boundary_lattice_of_top_face(self.m, self.r, self.mode)
        if not len(pts):
            return pts[:, 0]
        return self.evaluate(pts)


def boundary_lattice_of_top_face(m, r, mode=FLOAT):
    """Order-r lattice points of S_m = {sum lam = 1} lying on its relative boundary."""
    pts = [g for g in multi_indices(m + 1, r) if min(g) == 0] if m > 0 else []
    arr = np.array(pts, dtype=int).reshape(-1, m + 1)
    return arith.exact_array(arr) / r if mode == RATIONAL else arr / r
