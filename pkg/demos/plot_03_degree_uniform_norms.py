"""
Norms that do not grow with the degree
======================================

For each r the largest Rayleigh quotient of sum_f ||B_f u||^2 / ||u||^2
over the degree-r space is a dense generalized eigenvalue. On the
criss-cross square it levels off as r grows.
"""

from bubbletx import operator_norm_on_Pr
from bubbletx.meshes import crisscross_square

mesh = crisscross_square()

print(" r   B in H1    B in L2")
for r in range(1, 9):
    h1 = operator_norm_on_Pr(mesh, "B", r, "h1")
    l2 = operator_norm_on_Pr(mesh, "B", r, "l2")
    print(f"{r:2d}  {h1:8.4f}  {l2:8.4f}")

###############################################################################
# The projection built from the transform reproduces every degree-r
# function, so on that space its quotient is exactly one.

print("\npi on P_4:", operator_norm_on_Pr(mesh, "pi", 4, "h1"))
