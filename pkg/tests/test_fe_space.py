import math

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from bubbletx import arith
from bubbletx.arith import FLOAT, RATIONAL
from bubbletx.fe_space import (FESpace, PiecewisePolynomial, SimplexPolynomial, bernstein_basis,
                               boundary_lattice_of_top_face, de_casteljau, dof_averages, dof_matrix,
                               dof_moments, interpolate, is_in_zero_trace_space, lagrange_basis,
                               lagrange_basis_grad, lattice_mean_weights, lattice_points,
                               lattice_to_bernstein, multi_indices, random_element, trace)
from bubbletx.meshes import NAMED, diagonal_square

from conftest import random_points_in_cells


def _cubic(x):
    # independent oracle for degree-3 reproduction
    if x.shape[1] == 1:
        return 1 - 2 * x[:, 0] + 3 * x[:, 0] ** 3
    out = 0.5 + x[:, 0] * x[:, 1] ** 2 - 2 * x[:, 1] ** 3 + x[:, 0]
    if x.shape[1] == 3:
        out = out + x[:, 2] * x[:, 0] * x[:, 1] - x[:, 2] ** 2
    return out


# -- local bases --------------------------------------------------------------

@pytest.mark.parametrize("k,r", [(2, 3), (3, 1), (3, 4), (4, 2)])
def test_multi_index_count(k, r):
    assert len(multi_indices(k, r)) == math.comb(r + k - 1, k - 1)
    assert all(sum(a) == r for a in multi_indices(k, r))


@pytest.mark.parametrize("k,r", [(2, 4), (3, 3), (4, 2)])
def test_lagrange_basis_is_nodal(k, r):
    pts = lattice_points(k, r)
    assert np.allclose(lagrange_basis(pts, r), np.eye(len(pts)), atol=1e-13)


@pytest.mark.parametrize("k,r", [(2, 4), (3, 3), (4, 2)])
def test_lagrange_basis_exact_is_nodal(k, r):
    pts = lattice_points(k, r, RATIONAL)
    phi = lagrange_basis(pts, r)
    assert np.all(phi == np.eye(len(pts), dtype=int))


@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2 ** 31))
def test_partition_of_unity(k, r, seed):
    bary = np.random.default_rng(seed).dirichlet(np.ones(k), 5)
    assert np.allclose(lagrange_basis(bary, r).sum(axis=1), 1.0)
    assert np.allclose(bernstein_basis(bary, r).sum(axis=1), 1.0)
    # the sum is constant, so its tangential derivatives vanish
    g = lagrange_basis_grad(bary, r).sum(axis=1)
    assert np.allclose(g - g[:, :1], 0.0, atol=1e-10)


@pytest.mark.parametrize("k,r", [(2, 3), (3, 4), (4, 3)])
def test_bernstein_round_trip(k, r, rng):
    vals = rng.standard_normal(len(multi_indices(k, r)))
    coeffs = lattice_to_bernstein(k, r) @ vals
    assert np.allclose(bernstein_basis(lattice_points(k, r), r) @ coeffs, vals)
    bary = rng.dirichlet(np.ones(k), 20)
    assert np.allclose(de_casteljau(coeffs, bary, r), lagrange_basis(bary, r) @ vals)


def test_lagrange_gradient_finite_difference(rng):
    k, r, h = 3, 3, 1e-6
    bary = rng.dirichlet(np.ones(k), 4)
    g = lagrange_basis_grad(bary, r)
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        fd = (lagrange_basis(bary + e, r) - lagrange_basis(bary - e, r)) / (2 * h)
        assert np.allclose(g[:, :, i], fd, atol=1e-7)


@pytest.mark.parametrize("k,r", [(2, 5), (3, 4), (4, 3)])
def test_lattice_mean_weights(k, r):
    # mean of lam^alpha over the simplex is (k-1)! alpha! / (|alpha| + k - 1)!
    w = lattice_mean_weights(k, r, RATIONAL)
    pts = lattice_points(k, r, RATIONAL)
    for alpha in multi_indices(k, r)[:6]:
        vals = np.array([math.prod(p[i] ** alpha[i] for i in range(k)) for p in pts], dtype=object)
        expect = mpq(math.factorial(k - 1) * math.prod(map(math.factorial, alpha)),
                     math.factorial(r + k - 1))
        assert w @ vals == expect


# -- the global space ---------------------------------------------------------

@pytest.mark.parametrize("name", ["interval3", "crisscross", "diagonal8", "two_tets"])
@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_dimension_counts_domain_points(name, r):
    mesh = NAMED[name]()
    space = FESpace(mesh, r)
    # each m-face carries C(r-1, m) interior lattice points
    expect = sum(math.comb(r - 1, m) * len(mesh.subsimplexes[m]) for m in range(mesh.dim + 1))
    assert space.ndofs == expect
    assert len({tuple(np.round(p, 12)) for p in space.points}) == space.ndofs


def test_degree_zero_rejected(crisscross):
    with pytest.raises(ValueError):
        FESpace(crisscross, 0)


def test_constant_evaluates_to_one(crisscross, rng):
    u = interpolate(FESpace(crisscross, 3), lambda x: 1.0)
    _, _, pts = random_points_in_cells(crisscross, rng, 40)
    assert np.allclose(u(pts), 1.0)


def test_p1_interpolation_is_affine(diagonal8, rng):
    u = interpolate(FESpace(diagonal8, 1), lambda x: 2 * x[:, 0] - 3 * x[:, 1] + 0.25)
    _, _, pts = random_points_in_cells(diagonal8, rng, 40)
    assert np.allclose(u(pts), 2 * pts[:, 0] - 3 * pts[:, 1] + 0.25)
    assert np.allclose(u.gradient(pts), [2.0, -3.0])


@pytest.mark.parametrize("name", ["interval3", "crisscross", "diagonal8", "two_tets"])
def test_cubic_reproduced(name, rng):
    mesh = NAMED[name]()
    u = interpolate(FESpace(mesh, 3), _cubic)
    cells, bary, pts = random_points_in_cells(mesh, rng, 60)
    assert np.allclose(u(pts), _cubic(pts), atol=1e-12)
    assert np.allclose(u.evaluate_barycentric(cells, bary), _cubic(pts), atol=1e-12)


def test_gradient_of_cubic(crisscross, rng):
    u = interpolate(FESpace(crisscross, 3), _cubic)
    _, _, pts = random_points_in_cells(crisscross, rng, 30)
    x, y = pts.T
    grad = np.stack([y ** 2 + 1, 2 * x * y - 6 * y ** 2], axis=1)
    assert np.allclose(u.gradient(pts), grad, atol=1e-10)


def test_rational_interpolation_is_exact(crisscross):
    space = FESpace(crisscross, 2)
    u = interpolate(space, lambda x: x[:, 0] * x[:, 1] - mpq(1, 3), RATIONAL)
    assert u.mode == RATIONAL
    centre = np.array([[mpq(0), mpq(1, 3), mpq(1, 3)]], dtype=object)
    centre[0, 0] = 1 - centre[0, 1] - centre[0, 2]
    # cell 0 = (0, 0), (1, 0), (0.5, 0.5); barycentre (1/2, 1/6)
    assert u.evaluate_barycentric([0], centre)[0] == mpq(1, 12) - mpq(1, 3)


def test_prolongation_preserves_function(two_tets, rng):
    u = random_element(FESpace(two_tets, 2), seed=1)
    v = u.prolong(4)
    cells, bary, _ = random_points_in_cells(two_tets, rng, 30)
    assert v.degree == 4
    assert np.allclose(u.evaluate_barycentric(cells, bary), v.evaluate_barycentric(cells, bary))
    with pytest.raises(ValueError):
        v.prolong(2)


def test_random_element_modes_agree(crisscross):
    space = FESpace(crisscross, 3)
    a = random_element(space, seed=5)
    b = random_element(space, seed=5, mode=RATIONAL)
    assert np.array_equal(a.values, arith.to_float(b.values))
    assert np.all(np.abs(a.values) < 1)
    assert not np.array_equal(a.values, random_element(space, seed=6).values)


def test_arithmetic_and_mismatch(crisscross, diagonal8):
    space = FESpace(crisscross, 2)
    u = random_element(space, 0)
    assert np.allclose((u + u - u * 2).values, 0)
    assert np.allclose((-u).values, -u.values)
    with pytest.raises(ValueError):
        u + random_element(FESpace(diagonal8, 2), 0)


@pytest.mark.parametrize("mode", [FLOAT, RATIONAL])
def test_serialization_round_trip(crisscross, mode):
    space = FESpace(crisscross, 3)
    u = random_element(space, 2, mode)
    v = PiecewisePolynomial.from_dict(space, u.to_dict())
    assert v.mode == mode and np.all(v.values == u.values)
    with pytest.raises(ValueError):
        PiecewisePolynomial.from_dict(FESpace(crisscross, 2), u.to_dict())


# -- traces and zero-trace spaces ---------------------------------------------

def test_trace_on_edge(crisscross):
    space = FESpace(crisscross, 3)
    u = interpolate(space, _cubic)
    f = (0, 4)
    vals = trace(u, f)
    pts = lattice_points(2, 3) @ crisscross.vertices[list(f)]
    assert np.allclose(vals, _cubic(pts))


def test_zero_trace_examples(diagonal8):
    space = FESpace(diagonal8, 1)
    hat_centre = np.zeros(space.ndofs)
    hat_centre[space.dofs_on((4,))] = 1
    hat_corner = np.zeros(space.ndofs)
    hat_corner[space.dofs_on((2,))] = 1
    assert is_in_zero_trace_space(PiecewisePolynomial(space, hat_centre), (4,))
    # vertex 2 = (1, 0) lies outside the star of the centre
    assert not is_in_zero_trace_space(PiecewisePolynomial(space, hat_corner), (4,))
    assert is_in_zero_trace_space(PiecewisePolynomial(space, hat_corner), (2,))


def test_zero_trace_is_relative_to_domain(crisscross):
    # the centre's star is the whole square, so nothing is cut off
    space = FESpace(crisscross, 2)
    assert is_in_zero_trace_space(random_element(space, 0), (4,))


@pytest.mark.parametrize("r", [1, 2, 3])
def test_bubble_dofs_of_cell(crisscross, r):
    space = FESpace(crisscross, r)
    # interior points of one triangle, plus points on boundary edges of the square
    inner = math.comb(r - 1, 2)
    boundary_edge = r - 1
    assert len(space.bubble_dofs(crisscross.cells[0])) == inner + boundary_edge


def test_face_dofs_ordering(crisscross):
    space = FESpace(crisscross, 2)
    idx = space.face_dofs((0, 4))
    expect = lattice_points(2, 2) @ crisscross.vertices[[0, 4]]
    assert np.allclose(space.points[idx], expect)


# -- degrees of freedom --------------------------------------------------------

def test_vertex_moment_is_point_value(crisscross):
    u = interpolate(FESpace(crisscross, 2), lambda x: 3 * x[:, 0] + x[:, 1] ** 2)
    assert dof_moments(u, (2,)) == pytest.approx([4.0])


def test_edge_moment_of_constant_is_length(crisscross):
    u = interpolate(FESpace(crisscross, 2), lambda x: 1.0)
    assert dof_moments(u, (0, 4)) == pytest.approx([math.sqrt(0.5)])
    assert dof_moments(u, (0, 1)) == pytest.approx([1.0])


def test_edge_moments_quadrature_oracle(crisscross):
    u = interpolate(FESpace(crisscross, 4), _cubic)
    f = (1, 2)
    t, w = np.polynomial.legendre.leggauss(8)
    s = (t + 1) / 2
    x = np.outer(1 - s, crisscross.vertices[1]) + np.outer(s, crisscross.vertices[2])
    lam = np.stack([1 - s, s], axis=1)
    got = dof_moments(u, f)
    for b, beta in enumerate(multi_indices(2, 2)):
        expect = 0.5 * w @ (_cubic(x) * lam[:, 0] ** beta[0] * lam[:, 1] ** beta[1])
        assert got[b] == pytest.approx(expect)


def test_cell_moment_below_degree_is_empty(crisscross):
    u = random_element(FESpace(crisscross, 2), 0)
    assert dof_averages(u, crisscross.cells[0]).size == 0


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_moment_dofs_unisolvent(r):
    space = FESpace(diagonal_square(1), r)
    mat = dof_matrix(space, RATIONAL)
    assert mat.shape == (space.ndofs, space.ndofs)
    assert arith.exact_rank(mat) == space.ndofs


# -- Gram matrices ---------------------------------------------------------------

def test_p1_mass_matrix_textbook(triangle):
    mass = FESpace(triangle, 1).gram("l2", mode=RATIONAL)
    assert np.all(mass == (np.ones((3, 3), dtype=int) + np.eye(3, dtype=int)) * mpq(1, 24))


def test_p1_stiffness_textbook(triangle):
    space = FESpace(triangle, 1)
    stiff = space.gram("h1", mode=RATIONAL) - space.gram("l2", mode=RATIONAL)
    expect = np.array([[1, -0.5, -0.5], [-0.5, 0.5, 0], [-0.5, 0, 0.5]])
    assert np.array_equal(arith.to_float(stiff), expect)


@pytest.mark.parametrize("kind", ["l2", "h1"])
@pytest.mark.parametrize("name", ["crisscross", "two_tets"])
def test_gram_modes_agree(kind, name):
    space = FESpace(NAMED[name](), 3)
    assert np.allclose(space.gram(kind), arith.to_float(space.gram(kind, mode=RATIONAL)), atol=1e-14)


def test_gram_gives_l2_norm(crisscross):
    from bubbletx.quadrature import norm_l2
    space = FESpace(crisscross, 3)
    u = random_element(space, 4)
    assert u.values @ space.gram("l2") @ u.values == pytest.approx(norm_l2(u, crisscross) ** 2)


# -- polynomials on the extended simplex --------------------------------------------

@pytest.mark.parametrize("m,r", [(0, 3), (1, 2), (2, 3)])
def test_simplex_nodes_interior(m, r):
    nodes = SimplexPolynomial.nodes(m, r)
    assert np.all(nodes > 0) and np.all(nodes.sum(axis=1) <= 1 + 1e-15)
    exact = SimplexPolynomial.nodes(m, r, RATIONAL)
    assert np.allclose(arith.to_float(exact), nodes)


@pytest.mark.parametrize("m,r", [(0, 3), (1, 2), (2, 3)])
def test_simplex_polynomial_reproduces(m, r, rng):
    def p(lam):
        return (1 + lam[:, 0]) ** r - lam.sum(axis=1) * lam[:, -1]
    sp = SimplexPolynomial.from_function(m, r, p)
    lam = rng.dirichlet(np.ones(m + 2), 10)[:, :m + 1]
    assert np.allclose(sp(lam), p(lam))


def test_simplex_polynomial_boundary_values():
    sp = SimplexPolynomial.from_function(1, 2, lambda lam: lam[:, 0] * lam[:, 1])
    assert np.allclose(sp.trace_boundary_values(), 0)
    assert len(boundary_lattice_of_top_face(2, 3)) == 9
    with pytest.raises(ValueError):
        SimplexPolynomial(1, 2, np.zeros(4))
