"""Simplicial complexes: subsimplexes, macroelements and opposite faces.

A subsimplex is identified by the sorted tuple of its vertex indices, so
``(3,)`` is vertex 3, ``(1, 4)`` an edge and a cell is the tuple stored in
:attr:`Triangulation.cells`.
"""
import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from . import arith

#: tolerance on barycentric coordinates for point location
LOCATE_TOL = 1e-12


class MeshError(ValueError):
    """Invalid or non-conforming triangulation."""


class PointLocationError(ValueError):
    """A point does not lie in the triangulated domain."""


@dataclass(frozen=True)
class MacroElement:
    """Cells around a subsimplex ``f``.

    ``cells`` are the cells containing ``f`` (the macroelement), ``extended_cells``
    the cells meeting ``f`` in at least one vertex, and ``opposite_faces[T]``
    the face of ``T`` spanned by the vertices not in ``f``.
    """
    f: tuple
    cells: tuple
    extended_cells: tuple
    opposite_faces: dict

    @property
    def dim(self):
        return len(self.f) - 1


class Triangulation:
    """A conforming simplicial triangulation of a connected domain in R^n, n <= 3.

    Parameters
    ----------
    vertices : array_like, shape (nv, n)
        Vertex coordinates. For n = 1 a flat list is accepted.
    cells : sequence of sequences of int
        The n-simplices, as ``n + 1`` vertex indices each. Cells are stored
        with sorted vertex tuples; orientation is irrelevant.
    """

    def __init__(self, vertices, cells):
        verts = np.array(vertices, dtype=float)
        if verts.ndim == 1:
            verts = verts[:, None]
        if verts.ndim != 2 or verts.shape[1] not in (1, 2, 3):
            raise MeshError("vertices must be an (nv, n) array with 1 <= n <= 3")
        verts.flags.writeable = False
        self.vertices = verts
        self.dim = verts.shape[1]
        self.cells = tuple(tuple(sorted(int(i) for i in c)) for c in cells)
        if not self.cells:
            raise MeshError("triangulation has no cells")
        self._validate()

    def __repr__(self):
        return f"Triangulation(dim={self.dim}, vertices={len(self.vertices)}, cells={len(self.cells)})"

    # -- construction checks ------------------------------------------------

    def _validate(self):
        n, nv = self.dim, len(self.vertices)
        for k, c in enumerate(self.cells):
            if len(c) != n + 1 or len(set(c)) != n + 1:
                raise MeshError(f"cell {k} must have {n + 1} distinct vertices, got {c}")
            if min(c) < 0 or max(c) >= nv:
                raise MeshError(f"cell {k} references a vertex outside 0..{nv - 1}")
            if not self.volumes[k] > 0:
                raise MeshError(f"cell {k} is degenerate (zero volume)")
        if len(set(self.cells)) != len(self.cells):
            raise MeshError("duplicate cells")
        unused = set(range(nv)) - {v for c in self.cells for v in c}
        if unused:
            raise MeshError(f"vertices {sorted(unused)} belong to no cell")
        facet_cells = {}
        for k, c in enumerate(self.cells):
            for facet in combinations(c, n):
                facet_cells.setdefault(facet, []).append(k)
        for facet, owners in facet_cells.items():
            if len(owners) > 2:
                raise MeshError(f"facet {facet} is shared by {len(owners)} cells")
        # a vertex inside (or on the boundary of) a cell it does not belong
        # to is a hanging node or an overlap
        bary = self._barycentric_all(self.vertices)
        for k, c in enumerate(self.cells):
            inside = np.all(bary[k] >= -LOCATE_TOL, axis=1)
            inside[list(c)] = False
            if inside.any():
                v = int(np.flatnonzero(inside)[0])
                raise MeshError(f"non-conforming mesh: vertex {v} lies in cell {k} = {c}")
        self._check_connected(facet_cells)

    def _check_connected(self, facet_cells):
        adj = [[] for _ in self.cells]
        for owners in facet_cells.values():
            if len(owners) == 2:
                a, b = owners
                adj[a].append(b)
                adj[b].append(a)
        seen = {0}
        queue = deque([0])
        while queue:
            for b in adj[queue.popleft()]:
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
        if len(seen) != len(self.cells):
            raise MeshError("domain is not connected")

    # -- geometry -----------------------------------------------------------

    @cached_property
    def volumes(self):
        out = np.empty(len(self.cells))
        for k, c in enumerate(self.cells):
            x = self.vertices[list(c)]
            out[k] = abs(np.linalg.det((x[1:] - x[0]).T)) / math.factorial(self.dim)
        out.flags.writeable = False
        return out

    @cached_property
    def exact_vertices(self):
        """Vertex coordinates as exact rationals (binary fractions of the floats)."""
        return arith.exact_array(self.vertices)

    @lru_cache(maxsize=None)
    def exact_volume(self, cell):
        x = self.exact_vertices[list(self.cells[cell])]
        e = (x[1:] - x[0]).T
        return abs(_exact_det(e)) / math.factorial(self.dim)

    def volume(self, cell, mode=arith.FLOAT):
        return self.exact_volume(cell) if mode == arith.RATIONAL else self.volumes[cell]

    @cached_property
    def _inverse_maps(self):
        """Per cell, the matrix taking x - x_0 to barycentric coordinates 1..n."""
        out = np.empty((len(self.cells), self.dim, self.dim))
        for k, c in enumerate(self.cells):
            x = self.vertices[list(c)]
            out[k] = np.linalg.inv((x[1:] - x[0]).T)
        return out

    @lru_cache(maxsize=None)
    def exact_barycentric_gradients(self, cell):
        """(n+1, n) array of exact gradients of the cell's barycentric coordinates."""
        x = self.exact_vertices[list(self.cells[cell])]
        inv = arith.exact_inverse((x[1:] - x[0]).T)
        return np.vstack([-inv.sum(axis=0)[None, :], inv])

    def barycentric_gradients(self, cell, mode=arith.FLOAT):
        if mode == arith.RATIONAL:
            return self.exact_barycentric_gradients(cell)
        inv = self._inverse_maps[cell]
        return np.vstack([-inv.sum(axis=0), inv])

    def _barycentric_all(self, x):
        """Barycentric coordinates of points ``x`` (P, n) in every cell: (ncells, P, n+1)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        x0 = self.vertices[[c[0] for c in self.cells]]
        rest = np.einsum("kij,kpj->kpi", self._inverse_maps, x[None, :, :] - x0[:, None, :])
        return np.concatenate([1.0 - rest.sum(axis=2, keepdims=True), rest], axis=2)

    def barycentric(self, cell, x):
        """Barycentric coordinates of ``x`` (n,) or (P, n) with respect to ``cell``."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        c = self.cells[cell]
        rest = (np.atleast_2d(x) - self.vertices[c[0]]) @ self._inverse_maps[cell].T
        out = np.hstack([1.0 - rest.sum(axis=1, keepdims=True), rest])
        return out[0] if single else out

    def exact_barycentric(self, cell, x):
        x = arith.exact_array(x)
        c = self.cells[cell]
        grads = self.exact_barycentric_gradients(cell)
        d = x - self.exact_vertices[c[0]]
        rest = grads[1:] @ d
        return np.concatenate([[1 - rest.sum()], rest])

    def containing_cells(self, x, tol=LOCATE_TOL):
        """For each point, the sorted list of cells whose closure contains it."""
        bary = self._barycentric_all(x)
        inside = np.all(bary >= -tol, axis=2)
        return [list(np.flatnonzero(inside[:, p])) for p in range(inside.shape[1])]

    def locate(self, x, tol=LOCATE_TOL):
        """Lowest-indexed cell containing each point, and the barycentric coordinates.

        Returns ``(cell, bary)``; for a single point ``cell`` is an int, for
        (P, n) input an int array. Raises :class:`PointLocationError` for
        points outside the domain.
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dim:
            raise PointLocationError(f"expected points in R^{self.dim}, got shape {x.shape}")
        bary = self._barycentric_all(pts)
        inside = np.all(bary >= -tol, axis=2)
        found = inside.any(axis=0)
        if not found.all():
            p = int(np.flatnonzero(~found)[0])
            raise PointLocationError(f"point {pts[p].tolist()} is outside the domain")
        cells = np.argmax(inside, axis=0)
        b = bary[cells, np.arange(len(pts))]
        if single:
            return int(cells[0]), b[0]
        return cells, b

    # -- combinatorics ------------------------------------------------------

    @cached_property
    def subsimplexes(self):
        """Tuple over j = 0..n of the lexicographically sorted j-dimensional faces."""
        return tuple(
            tuple(sorted({face for c in self.cells for face in combinations(c, j + 1)}))
            for j in range(self.dim + 1)
        )

    @cached_property
    def _face_set(self):
        return {f for faces in self.subsimplexes for f in faces}

    def is_subsimplex(self, f):
        return tuple(f) in self._face_set

    def all_subsimplexes(self):
        """All subsimplexes ordered by dimension, then lexicographically."""
        return [f for faces in self.subsimplexes for f in faces]

    @cached_property
    def vertex_stars(self):
        stars = [[] for _ in self.vertices]
        for k, c in enumerate(self.cells):
            for v in c:
                stars[v].append(k)
        return tuple(tuple(s) for s in stars)

    @lru_cache(maxsize=None)
    def cells_containing(self, f):
        """Cells having ``f`` as a face (the intersection of its vertex stars)."""
        f = tuple(f)
        if not f:
            return tuple(range(len(self.cells)))
        common = set(self.vertex_stars[f[0]])
        for v in f[1:]:
            common &= set(self.vertex_stars[v])
        return tuple(sorted(common))

    @lru_cache(maxsize=None)
    def macroelement(self, f):
        f = tuple(f)
        if not self.is_subsimplex(f):
            raise MeshError(f"{f} is not a subsimplex of the triangulation")
        cells = self.cells_containing(f)
        extended = tuple(sorted({k for v in f for k in self.vertex_stars[v]}))
        opposite = {}
        if len(f) - 1 < self.dim:
            opposite = {k: tuple(v for v in self.cells[k] if v not in f) for k in cells}
        return MacroElement(f, cells, extended, opposite)

    def macro_volume(self, f, mode=arith.FLOAT):
        return sum(self.volume(k, mode) for k in self.cells_containing(f))

    # -- io -----------------------------------------------------------------

    def to_dict(self):
        return {
            "dim": self.dim,
            "vertices": self.vertices.tolist(),
            "cells": [list(c) for c in self.cells],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            dim, vertices, cells = data["dim"], data["vertices"], data["cells"]
        except KeyError as err:
            raise MeshError(f"mesh file is missing field {err.args[0]!r}") from None
        verts = np.array(vertices, dtype=float)
        if verts.ndim == 1:
            verts = verts[:, None]
        if verts.shape[1] != dim:
            raise MeshError(f"mesh declares dim={dim} but vertices have {verts.shape[1]} coordinates")
        return cls(verts, cells)


def enumerate_subsimplexes(mesh, j):
    """The j-dimensional subsimplexes of ``mesh`` in lexicographic order."""
    if not 0 <= j <= mesh.dim:
        raise ValueError(f"face dimension {j} outside 0..{mesh.dim}")
    return list(mesh.subsimplexes[j])


def macroelement(mesh, f):
    return mesh.macroelement(tuple(f))


def load_mesh(path):
    with open(path) as fh:
        return Triangulation.from_dict(json.load(fh))


def save_mesh(mesh, path):
    with open(path, "w") as fh:
        json.dump(mesh.to_dict(), fh)


def _exact_det(a):
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return sum((-1) ** j * a[0, j] * _exact_det(np.delete(a[1:], j, axis=1)) for j in range(n))
