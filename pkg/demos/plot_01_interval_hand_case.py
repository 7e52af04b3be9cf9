"""
The transform on three points of a line
=======================================

On the mesh {0, 0.5, 1} with u(x) = x, every vertex keeps u(x_j) times
its hat function and nothing is left for the two intervals.
"""

import numpy as np

from bubbletx import FESpace, interpolate, transform_poly
from bubbletx.arith import RATIONAL, fmt_array
from bubbletx.meshes import interval_mesh

mesh = interval_mesh((0, 0.5, 1))
u = interpolate(FESpace(mesh, 1), lambda x: x[:, 0], RATIONAL)
dec = transform_poly(u)

# lattice values of each component at the nodes 0, 0.5, 1
for f in dec.faces():
    print(f"B_{f} u =", fmt_array(dec[f].values))

# the residual after the vertex pass is already zero
print("u^1 =", fmt_array(dec.residuals[1].values))

###############################################################################
# A cubic on the same mesh does leave interval components. They vanish
# at all three nodes, since each lives in the interior of its interval.

u3 = interpolate(FESpace(mesh, 3), lambda x: x[:, 0] ** 3 + x[:, 0] ** 2, RATIONAL)
dec3 = transform_poly(u3)
pts = u3.space.points[:, 0]
order = np.argsort(pts)
print("\nnodes      ", [str(p) for p in np.round(pts[order], 4)])
for f in dec3.faces(1):
    print(f"B_{f} u ", fmt_array(dec3[f].values[order]))
print("sum - u =", (dec3.reconstruct() - u3).max_abs())
