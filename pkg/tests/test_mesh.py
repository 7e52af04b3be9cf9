import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bubbletx.mesh import (MeshError, PointLocationError, Triangulation, enumerate_subsimplexes,
                           load_mesh, macroelement, save_mesh)
from bubbletx.meshes import NAMED, diagonal_square


def brute_force_faces(cells, j):
    faces = set()
    for c in cells:
        faces.update(tuple(sorted(s)) for s in combinations(c, j + 1))
    return sorted(faces)


@pytest.mark.parametrize("j, count", [(0, 3), (1, 2)])
def test_interval_counts(interval3, j, count):
    assert len(enumerate_subsimplexes(interval3, j)) == count


def test_triangle_has_three_edges(triangle):
    assert enumerate_subsimplexes(triangle, 1) == [(0, 1), (0, 2), (1, 2)]


def test_crisscross_edges_match_brute_force(crisscross):
    expected = brute_force_faces(crisscross.cells, 1)
    assert len(expected) == 8
    assert enumerate_subsimplexes(crisscross, 1) == expected


@pytest.mark.parametrize("name", sorted(NAMED))
def test_faces_unique_and_sorted(name):
    mesh = NAMED[name]()
    for j in range(mesh.dim + 1):
        faces = enumerate_subsimplexes(mesh, j)
        assert faces == brute_force_faces(mesh.cells, j)
        assert all(list(f) == sorted(f) and len(set(f)) == j + 1 for f in faces)


@pytest.mark.parametrize("j", [-1, 3])
def test_face_dimension_out_of_range(crisscross, j):
    with pytest.raises(ValueError):
        enumerate_subsimplexes(crisscross, j)


def test_macroelement_of_cell_is_itself(crisscross):
    me = macroelement(crisscross, crisscross.cells[2])
    assert me.cells == (2,)
    assert me.opposite_faces == {}


def test_interval_interior_vertex_star(interval3):
    me = macroelement(interval3, (1,))
    assert me.cells == (0, 1)
    xs = interval3.vertices[[v for c in me.cells for v in interval3.cells[c]]]
    assert (xs.min(), xs.max()) == (0.0, 1.0)


def test_crisscross_center_and_spoke(crisscross):
    center = 4
    brute = [k for k, c in enumerate(crisscross.cells) if center in c]
    assert macroelement(crisscross, (center,)).cells == tuple(brute) == (0, 1, 2, 3)
    spoke = (0, 4)
    brute = [k for k, c in enumerate(crisscross.cells) if set(spoke) <= set(c)]
    assert macroelement(crisscross, spoke).cells == tuple(brute)
    assert len(brute) == 2


def test_macroelement_rejects_non_face(crisscross):
    with pytest.raises(MeshError):
        macroelement(crisscross, (0, 2))


@pytest.mark.parametrize("name", ["crisscross", "diagonal8", "two_tets", "interval3"])
def test_macroelement_identities(name):
    mesh = NAMED[name]()
    stars = mesh.vertex_stars
    for f in mesh.all_subsimplexes():
        me = mesh.macroelement(f)
        inter = set.intersection(*(set(stars[v]) for v in f))
        union = set.union(*(set(stars[v]) for v in f))
        assert set(me.cells) == inter and me.cells
        assert set(me.extended_cells) == union
        assert set(me.cells) <= set(me.extended_cells)
        for v in f:
            assert set(me.cells) <= set(stars[v])
        for cell, opp in me.opposite_faces.items():
            assert set(opp) | set(f) == set(mesh.cells[cell]) and not set(opp) & set(f)


@pytest.mark.parametrize("name", ["crisscross", "diagonal8", "two_tets"])
def test_macroelement_monotone_under_subfaces(name):
    mesh = NAMED[name]()
    for f in mesh.all_subsimplexes():
        me = mesh.macroelement(f)
        for k in range(1, len(f)):
            for g in combinations(f, k):
                mg = mesh.macroelement(g)
                assert set(mg.cells) >= set(me.cells)
                assert set(mg.extended_cells) <= set(me.extended_cells)


def _boundary_faces(mesh, cells):
    """Facets of the union of ``cells`` that belong to exactly one of them, as vertex sets."""
    count = {}
    for c in cells:
        for facet in combinations(mesh.cells[c], mesh.dim):
            count[facet] = count.get(facet, 0) + 1
    return {facet for facet, k in count.items() if k == 1}


@pytest.mark.parametrize("name", ["crisscross", "diagonal8"])
def test_opposite_faces_lie_on_both_boundaries(name):
    mesh = NAMED[name]()
    for f in mesh.all_subsimplexes():
        if len(f) - 1 == mesh.dim:
            continue
        me = mesh.macroelement(f)
        bd = _boundary_faces(mesh, me.cells)
        bde = _boundary_faces(mesh, me.extended_cells)
        for opp in me.opposite_faces.values():
            assert any(set(opp) <= set(facet) for facet in bd)
            assert any(set(opp) <= set(facet) for facet in bde)
        # the facets of the macroelement boundary not touching f are exactly the opposite faces
        far = {facet for facet in bd if not set(facet) & set(f)}
        if len(f) - 1 == mesh.dim - 1:
            continue
        assert far == {tuple(sorted(o)) for o in me.opposite_faces.values()}


def test_rejects_degenerate_cell():
    with pytest.raises(MeshError, match="degenerate"):
        Triangulation([(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])


def test_rejects_hanging_node():
    verts = [(0, 0), (1, 0), (0, 1), (0.5, 0.5), (1, 1)]
    cells = [(0, 1, 2), (1, 3, 4), (3, 2, 4)]
    with pytest.raises(MeshError, match="non-conforming"):
        Triangulation(verts, cells)


def test_rejects_disconnected():
    verts = [(0, 0), (1, 0), (0, 1), (5, 5), (6, 5), (5, 6)]
    with pytest.raises(MeshError, match="connected"):
        Triangulation(verts, [(0, 1, 2), (3, 4, 5)])


def test_rejects_repeated_vertex_in_cell():
    with pytest.raises(MeshError):
        Triangulation([(0, 0), (1, 0), (0, 1)], [(0, 1, 1)])


def test_json_round_trip(tmp_path, diagonal8):
    mesh = diagonal_square(3)
    path = tmp_path / "m.json"
    save_mesh(mesh, path)
    back = load_mesh(path)
    assert back.cells == mesh.cells
    assert np.array_equal(back.vertices, mesh.vertices)
    data = json.loads(path.read_text())
    assert set(data) == {"dim", "vertices", "cells"}


def test_missing_field_is_reported():
    with pytest.raises(MeshError, match="cells"):
        Triangulation.from_dict({"dim": 1, "vertices": [[0], [1]]})


def test_locate_is_deterministic_on_shared_faces(crisscross):
    cell, bary = crisscross.locate(np.array([0.5, 0.5]))
    assert cell == 0
    assert np.isclose(bary.sum(), 1)
    with pytest.raises(PointLocationError):
        crisscross.locate(np.array([1.5, 0.5]))


@given(st.integers(1, 4))
def test_diagonal_grid_counts(k):
    mesh = diagonal_square(k)
    assert len(mesh.cells) == 2 * k * k
    assert len(mesh.subsimplexes[1]) == 3 * k * k + 2 * k
    # Euler characteristic of a disk
    assert len(mesh.vertices) - len(mesh.subsimplexes[1]) + len(mesh.cells) == 1


def test_volumes(crisscross):
    assert np.allclose(crisscross.volumes, 0.25)
    assert crisscross.exact_volume(0) == 0.25
