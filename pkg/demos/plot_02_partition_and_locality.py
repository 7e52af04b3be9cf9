"""
Partition of a random polynomial on a square
============================================

A random degree-4 element on the 8-triangle mesh is split exactly, in
rational arithmetic. Each component vanishes outside the macroelement
of its subsimplex.
"""

from bubbletx import FESpace, certify, is_in_zero_trace_space, random_element, transform_poly
from bubbletx.arith import RATIONAL
from bubbletx.meshes import diagonal_square

mesh = diagonal_square(2)
u = random_element(FESpace(mesh, 4), seed=1, mode=RATIONAL)
dec = transform_poly(u)
report = certify(dec)

print("reconstruction defect:", report["reconstruction_defect"])
print("all components local:", report["all_zero_trace"])

###############################################################################
# How much of the mesh does each component touch? Count the cells where
# it is not identically zero, next to the size of the macroelement.

space = u.space
for f in dec.faces():
    comp = dec[f]
    touched = sum(any(x != 0 for x in comp.values[space.cell_dofs[c]]) for c in range(len(mesh.cells)))
    macro = len(mesh.cells_containing(f))
    assert is_in_zero_trace_space(comp, f, 0)
    print(f"{str(f):12s} dim {len(f) - 1}  nonzero on {touched} of {macro} macroelement cells")

###############################################################################
# Squared norms: the components together against the input.

for kind in ("l2", "h1"):
    print(f"{kind}: sum of component norms^2 / norm^2 = {report['ratio'][kind]:.4f}")
