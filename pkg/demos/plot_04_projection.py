"""
Projecting a smooth function
============================

The sampled transform of u = sin(pi x) sin(pi y) is projected, face by
face, onto local bubbles. The L2 error drops quickly with the degree.
"""

import numpy as np

from bubbletx import FESpace, global_projection, norm_l2
from bubbletx.meshes import crisscross_square

mesh = crisscross_square()


def u(x):
    return np.sin(np.pi * x[:, 0]) * np.sin(np.pi * x[:, 1])


print(" r   ||u - pi u||_0")
for r in range(1, 5):
    pu = global_projection(FESpace(mesh, r), u, "l2", sample_degree=2 * r + 4)
    err = norm_l2(lambda x: u(x) - pu(x), mesh, degree=2 * r + 6)
    print(f"{r:2d}  {err:.3e}")

###############################################################################
# Applying the projection to its own output changes nothing.

space = FESpace(mesh, 2)
p = global_projection(space, u, "l2", sample_degree=8)
print("\nmax |pi(pi u) - pi u| =", np.abs(global_projection(space, p, "l2").values - p.values).max())
