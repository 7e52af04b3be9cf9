"""
Polar coordinates around a subsimplex
=====================================

Any point of a cell containing f is a combination of f's vertices plus a
slack-weighted point q on the opposite face. Integrals over the
macroelement can be taken in these coordinates.
"""

import numpy as np

from bubbletx import polar_decompose, polar_integral
from bubbletx.geometry import contract, jacobian_factor, polar_reconstruct
from bubbletx.meshes import crisscross_square
from bubbletx.quadrature import integrate

mesh = crisscross_square()
f = (0, 4)
x = np.array([0.45, 0.2])
pc = polar_decompose(mesh, f, x, cell=0)
print("lambda =", pc.lam, " rho =", pc.rho, " q =", pc.q)
print("reconstructed:", polar_reconstruct(mesh, pc))
print("Jacobian factor on cell 0:", jacobian_factor(mesh, f, 0))

###############################################################################
# The integral of a quadratic over the macroelement, directly and in
# polar coordinates.


def g(x):
    return 1 + x[:, 0] ** 2 - x[:, 0] * x[:, 1]


cells = mesh.cells_containing(f)
direct = integrate(g, mesh, cells, degree=2)
polar = polar_integral(mesh, f, lambda L, Q: g(contract(mesh.vertices[list(f)], L, Q)), 6)
print(f"\ndirect {direct:.15f}\npolar  {polar:.15f}")
