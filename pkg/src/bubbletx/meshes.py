"""Small fixed triangulations used by the tests, demos and CLI."""
import numpy as np

from .mesh import Triangulation


def interval_mesh(points=(0.0, 0.5, 1.0)):
    """Partition of an interval at the given increasing points."""
    pts = np.asarray(points, dtype=float)
    if np.any(np.diff(pts) <= 0):
        raise ValueError("interval points must be strictly increasing")
    return Triangulation(pts[:, None], [(i, i + 1) for i in range(len(pts) - 1)])


def reference_simplex(n):
    """The single simplex [0, e_1, ..., e_n]."""
    verts = np.vstack([np.zeros(n), np.eye(n)])
    return Triangulation(verts, [tuple(range(n + 1))])


def crisscross_square():
    """Unit square cut by both diagonals: 5 vertices, 4 triangles.

    Vertex 4 is the centre (0.5, 0.5).
    """
    verts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    cells = [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)]
    return Triangulation(verts, cells)


def diagonal_square(k=2):
    """k x k grid on the unit square, each square split by its (0,0)-(1,1) diagonal.

    ``diagonal_square(2)`` is the 8-triangle mesh with 9 vertices.
    """
    xs = np.linspace(0.0, 1.0, k + 1)
    verts = [(x, y) for y in xs for x in xs]
    idx = lambda i, j: j * (k + 1) + i  # noqa: E731
    cells = []
    for j in range(k):
        for i in range(k):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            cells += [(a, b, c), (a, c, d)]
    return Triangulation(verts, cells)


def two_tetrahedra():
    """Two tetrahedra sharing the face x = 0."""
    verts = [(0, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0), (-1, 0, 0)]
    return Triangulation(verts, [(0, 1, 2, 3), (0, 1, 2, 4)])


NAMED = {
    "interval3": interval_mesh,
    "crisscross": crisscross_square,
    "diagonal8": lambda: diagonal_square(2),
    "triangle": lambda: reference_simplex(2),
    "tetrahedron": lambda: reference_simplex(3),
    "two_tets": two_tetrahedra,
}
