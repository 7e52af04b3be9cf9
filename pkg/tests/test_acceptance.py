"""Acceptance criteria, one test per criterion, at the stated tolerances.

A summary line per criterion (PASS/FAIL with its runtime) is printed at
the end of the pytest run.
"""
import math
import time

import numpy as np
import pytest
from gmpy2 import mpq

from bubbletx import arith
from bubbletx.arith import FLOAT, RATIONAL
from bubbletx.bubble_ops import FaceAverage, average_poly, cutoff_poly
from bubbletx.fe_space import (FESpace, SimplexPolynomial, interpolate, lattice_mean_weights,
                               lattice_points, random_element)
from bubbletx.geometry import (compose_weights, contract, polar_decompose, polar_integral,
                               polar_reconstruct, slack)
from bubbletx.meshes import NAMED, interval_mesh
from bubbletx.projection import global_projection, operator_norm_on_Pr
from bubbletx.quadrature import monomial_integral, simplex_rule, weighted_decay_integral
from bubbletx.transform import transform_poly, transform_sampled, transform_values

from conftest import random_points_in_cells

MESHES_2D = ("crisscross", "diagonal8")
DEGREES = range(1, 6)
SAMPLES = 20


def _zero(values):
    return all(x == 0 for x in np.asarray(values).ravel())


def _random_batch(space, seed, mode):
    """SAMPLES random elements as an (N, SAMPLES) array of lattice values, dyadic in both modes."""
    k = np.random.default_rng(seed).integers(-1023, 1024, (space.ndofs, SAMPLES))
    if mode == RATIONAL:
        return np.vectorize(lambda i: mpq(int(i), 1024), otypes=[object])(k)
    return k / 1024.0


_BATCHES = {}


def _decompositions(mode):
    """Components and residuals for every mesh, degree and sample (computed once per mode)."""
    if mode not in _BATCHES:
        out = {}
        start = time.perf_counter()
        for name in MESHES_2D:
            mesh = NAMED[name]()
            for r in DEGREES:
                space = FESpace(mesh, r)
                values = _random_batch(space, 1000 * r + len(name), mode)
                comps, residuals = transform_values(space, values, check=True)
                out[name, r] = (space, values, comps, residuals)
        _BATCHES[mode] = (out, time.perf_counter() - start)
    return _BATCHES[mode]


def _outside_ok(space, f, comp, tol):
    outside = comp[space.exterior_dofs(f)]
    if tol == 0:
        return _zero(outside)
    return np.abs(arith.to_float(outside)).max(initial=0.0) <= tol


def test_criterion_1_interval_hand_case():
    """criterion 1: 1D hand case B_j u = u(x_j) lam_j, interval components 0, exact"""
    start = time.perf_counter()
    mesh = interval_mesh((0, 0.5, 1))
    u = interpolate(FESpace(mesh, 1), lambda x: x[:, 0], RATIONAL)
    dec = transform_poly(u)
    expected = {(0,): [0, 0, 0], (1,): [0, mpq(1, 2), 0], (2,): [0, 0, 1]}
    for f, vals in expected.items():
        assert list(dec[f].values) == vals
    assert _zero(dec[(0, 1)].values) and _zero(dec[(1, 2)].values)
    assert time.perf_counter() - start < 1.0


@pytest.mark.parametrize("mode", [RATIONAL, FLOAT])
def test_criterion_2_components_are_local_bubbles(mode):
    """criterion 2: every component lies in the bubble space of its macroelement (r = 1..5, 2 meshes)"""
    batches, elapsed = _decompositions(mode)
    for (name, r), (space, values, comps, _) in batches.items():
        for f, comp in comps.items():
            for k in range(SAMPLES):
                tol = 0 if mode == RATIONAL else 1e-9 * np.abs(values[:, k]).max()
                assert _outside_ok(space, f, comp[:, k], tol), (name, r, f, k)
    assert elapsed < 30


@pytest.mark.parametrize("mode", [RATIONAL, FLOAT])
def test_criterion_3_partition_of_input(mode):
    """criterion 3: components sum to u, exactly (rational) or within 1e-9 (float)"""
    batches, _ = _decompositions(mode)
    for (name, r), (space, values, comps, _) in batches.items():
        total = sum(comps.values())
        defect = total - values
        if mode == RATIONAL:
            assert _zero(defect), (name, r)
        else:
            assert np.abs(defect).max() <= 1e-9 * np.abs(values).max(), (name, r)


@pytest.mark.parametrize("mode", [RATIONAL, FLOAT])
def test_criterion_4_trace_and_skeleton(mode):
    """criterion 4: tr_f B_f u = tr_f u^m and u^m vanishes on all faces of dimension < m, at every pass"""
    batches, _ = _decompositions(mode)
    for (name, r), (space, values, comps, residuals) in batches.items():
        mesh = space.mesh
        tol = 0 if mode == RATIONAL else 1e-9 * np.abs(values).max()
        for m in range(mesh.dim + 1):
            res = residuals[m]
            low = [p for p, s in enumerate(space.supports) if len(s) <= m]
            if low:
                assert np.abs(arith.to_float(res[low])).max() <= tol if tol else _zero(res[low])
            for f in mesh.subsimplexes[m]:
                idx = space.dofs_on(f)
                diff = comps[f][idx] - res[idx]
                assert np.abs(arith.to_float(diff)).max() <= tol if tol else _zero(diff)


def _exact_average(v, f, lam):
    """A_f v(lam) at one exact point: per-cell lattice mean of v(contract(lam, y))."""
    mesh, r = v.mesh, v.degree
    n = mesh.dim
    gammas = lattice_points(n + 1, r, RATIONAL)
    w = lattice_mean_weights(n + 1, r, RATIONAL)
    b = 1 - sum(lam)
    total = 0
    for c in mesh.cells_containing(f):
        bary = b * gammas
        for j, vert in enumerate(f):
            bary[:, mesh.cells[c].index(vert)] += lam[j]
        vals = v.evaluate_barycentric(np.full(len(bary), c), bary)
        total += mesh.volume(c, RATIONAL) * (w @ vals)
    return total / mesh.macro_volume(f, RATIONAL)


def test_criterion_5_cutoff_and_average_exact():
    """criterion 5: K_0 closed form, leg vanishing of K_m, degree and S_m trace of A_f, exact for m <= 1, r <= 4"""
    rng = np.random.default_rng(5)
    for r in range(1, 5):
        # K_0 w(lam) = w(lam) - (1 - lam) w(0)
        coeffs = [mpq(int(c), 5) for c in rng.integers(-9, 10, r + 1)]

        def w0(lam):
            return sum(c * lam[:, 0] ** k for k, c in enumerate(coeffs))
        k0 = cutoff_poly(SimplexPolynomial.from_function(0, r, w0, RATIONAL))
        lam = lattice_points(2, 2 * r, RATIONAL)[:, :1]
        assert np.all(k0(lam) == w0(lam) - (1 - lam[:, 0]) * coeffs[0])

        # K_1 on a w whose trace on S_1 vanishes at both ends
        c = [mpq(int(x), 3) for x in rng.integers(-6, 7, 3)]

        def w1(lam):
            b = 1 - lam[:, 0] - lam[:, 1]
            if r == 1:
                return b * c[1]
            bubble = lam[:, 0] * lam[:, 1] * c[0] * (lam[:, 0] + lam[:, 1]) ** (r - 2)
            return bubble + b * (c[1] + c[2] * lam[:, 0])
        k1 = cutoff_poly(SimplexPolynomial.from_function(1, r, w1, RATIONAL))
        pts = lattice_points(3, r, RATIONAL)[:, 1:]
        for i in range(2):
            leg = pts[[p[i] == 0 for p in pts]]
            assert _zero(k1(leg))
        top = lattice_points(2, r, RATIONAL)
        assert np.all(k1(top) == w1(top))

        # A_f preserves degree and reproduces v on S_m
        for name, faces in (("crisscross", [(4,), (0, 4)]), ("diagonal8", [(0,), (3, 4)])):
            mesh = NAMED[name]()
            v = random_element(FESpace(mesh, r), r, RATIONAL)
            for f in faces:
                avg = average_poly(f, v)
                top = lattice_points(len(f), r, RATIONAL)
                assert np.all(avg(top) == v.values[v.space.face_dofs(f)])
                # off-node exact values agree with the degree-r representation
                for _ in range(3):
                    lam = np.array([mpq(int(k), 17) for k in rng.integers(1, 8, len(f))], dtype=object)
                    assert avg(lam[None, :])[0] == _exact_average(v, f, lam)


def test_criterion_6_geometry():
    """criterion 6: composition, b-multiplicativity, polar reconstruction and integration to 1e-10 on 2D meshes"""
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    for name in MESHES_2D:
        mesh = NAMED[name]()
        for f in mesh.all_subsimplexes():
            m = len(f) - 1
            if m == mesh.dim:
                continue
            verts = mesh.vertices[list(f)]
            lam = rng.dirichlet(np.ones(m + 2), 50)[:, :m + 1]
            mu = rng.dirichlet(np.ones(m + 2), 50)[:, :m + 1]
            y = rng.uniform(-1, 2, (50, 2))
            lhs = contract(verts, lam, contract(verts, mu, y))
            rhs = contract(verts, compose_weights(lam, mu), y)
            assert np.abs(lhs - rhs).max() <= 1e-10 * np.abs(y).max()
            prod = slack(compose_weights(lam, mu))
            assert np.allclose(prod, slack(lam) * slack(mu), rtol=1e-10, atol=1e-16)
            for c in mesh.cells_containing(f):
                pts = rng.dirichlet(np.ones(3), 20) @ mesh.vertices[list(mesh.cells[c])]
                for x in pts:
                    back = polar_reconstruct(mesh, polar_decompose(mesh, f, x, cell=c))
                    assert np.abs(back - x).max() <= 1e-10 * max(1.0, np.abs(x).max())

            def phi(L, Q):
                x = contract(verts, L, Q)
                return (1 + x[:, 0] - x[:, 1] ** 2) ** 2
            rule = simplex_rule(2, 4)
            direct = 0.0
            for c in mesh.cells_containing(f):
                x = rule.points @ mesh.vertices[list(mesh.cells[c])]
                vals = (1 + x[:, 0] - x[:, 1] ** 2) ** 2
                direct += 2 * mesh.volumes[c] * (rule.weights @ vals)
            polar = polar_integral(mesh, f, phi, 8 + mesh.dim)
            assert abs(polar - direct) <= 1e-10 * abs(direct)
            ones = polar_integral(mesh, f, lambda L, Q: np.ones(len(L)), mesh.dim)
            assert abs(ones - mesh.macro_volume(f)) <= 1e-10 * mesh.macro_volume(f)
    assert time.perf_counter() - start < 10


def _bounded(values):
    return max(values[4:]) <= 1.25 * max(values[:4])


def test_criterion_7_degree_uniform_norms():
    """criterion 7: operator norms of B (H1) and pi (L2, H1) on the crisscross mesh do not grow with r = 1..8"""
    start = time.perf_counter()
    mesh = NAMED["crisscross"]()
    b_h1 = [operator_norm_on_Pr(mesh, "B", r, "h1") for r in range(1, 9)]
    assert _bounded(b_h1)
    for norm in ("l2", "h1"):
        pi = [operator_norm_on_Pr(mesh, "pi", r, norm) for r in range(1, 9)]
        assert _bounded(pi)
    for r in range(1, 9):
        space = FESpace(mesh, r)
        p = random_element(space, r)
        for inner in ("l2", "h1"):
            assert np.allclose(global_projection(space, p, inner).values, p.values, atol=1e-9)
    p = random_element(FESpace(mesh, 3), 0, RATIONAL)
    assert np.all(global_projection(p.space, p).values == p.values)
    assert time.perf_counter() - start < 120


def test_criterion_8_sampled_path():
    """criterion 8: sampled path matches the exact path, reconstructs sin*sin to 1e-6 and has stable decay integrals"""
    rng = np.random.default_rng(8)
    mesh = NAMED["crisscross"]()
    u = random_element(FESpace(mesh, 3), 8)
    exact = transform_poly(u)
    sampled = transform_sampled(mesh, u, degree=6)
    cells, bary, _ = random_points_in_cells(mesh, rng, 100)
    for f in exact.faces():
        got = sampled[f].evaluate_barycentric(cells, bary)
        assert np.abs(got - exact[f].evaluate_barycentric(cells, bary)).max() <= 1e-9

    def smooth(x):
        return np.sin(np.pi * x[:, 0]) * np.sin(np.pi * x[:, 1])
    dec = transform_sampled(mesh, smooth, degree=20)
    cells, bary, pts = random_points_in_cells(mesh, rng, 50)
    assert np.abs(dec.evaluate_sum(cells, bary) - smooth(pts)).max() <= 1e-6

    def v(x):
        return np.sin(x[:, 0]) * np.cos(x[:, 1])

    class Difference:
        def __init__(self, f):
            self.avg = FaceAverage(mesh, f, v, 10)

        def evaluate_barycentric(self, cells, bary):
            x = np.einsum("pk,pkd->pd", bary, mesh.vertices[np.array(mesh.cells)[cells]])
            return v(x) - self.avg.evaluate_barycentric(cells, bary)
    for f in [(0,), (4,), (0, 4), (0, 1)]:
        w = Difference(f)
        coarse = weighted_decay_integral(mesh, f, w, 8)
        fine = weighted_decay_integral(mesh, f, w, 12)
        assert math.isfinite(coarse) and abs(fine - coarse) <= 0.05 * abs(coarse)


def test_criterion_9_quadrature_exactness():
    """criterion 9: monomial sweep against closed-form simplex moments to 1e-13, d <= 12, dims 1..3"""
    for dim in (1, 2, 3):
        for d in range(13):
            rule = simplex_rule(dim, d)
            for a in np.ndindex(*(d + 1,) * dim):
                if sum(a) > d:
                    continue
                got = rule.weights @ np.prod(rule.cartesian ** np.array(a), axis=1)
                exact = monomial_integral(a)
                assert abs(got - exact) <= 1e-13 * exact, (dim, d, a)
