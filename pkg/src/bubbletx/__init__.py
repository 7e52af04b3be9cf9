"""Bubble transform on simplicial meshes.

Splits a function on a triangulated domain into components, one per
subsimplex, each supported in the macroelement of its subsimplex. The
split is exact on continuous piecewise polynomials, and it yields
projections onto those spaces with bounds that do not grow with the
polynomial degree.
"""
from .arith import FLOAT, RATIONAL
from .bubble_ops import (PreconditionError, average_eval, average_poly, cf_poly, cutoff_apply,
                         cutoff_poly, index_subsets, project_index)
from .fe_space import (FESpace, PiecewisePolynomial, SimplexPolynomial, dof_moments, interpolate,
                       is_in_zero_trace_space, random_element, trace)
from .geometry import (compose_weights, contract_toward_face, hat_function, jacobian_factor,
                       lambda_f, polar_decompose, polar_integral, rho_f, slack)
from .mesh import MacroElement, MeshError, Triangulation, enumerate_subsimplexes, load_mesh, macroelement
from .projection import global_projection, local_bubble_basis, local_project, operator_norm_on_Pr
from .quadrature import norm_h1, norm_l2, simplex_rule, weighted_decay_integral
from .transform import (BubbleDecomposition, InvariantError, certify, transform_poly,
                        transform_sampled)

__version__ = "0.1.0"

__all__ = [
    "FLOAT", "RATIONAL",
    "Triangulation", "MacroElement", "MeshError", "enumerate_subsimplexes", "macroelement", "load_mesh",
    "hat_function", "lambda_f", "rho_f", "slack", "contract_toward_face", "compose_weights",
    "polar_decompose", "jacobian_factor", "polar_integral",
    "FESpace", "PiecewisePolynomial", "SimplexPolynomial", "interpolate", "random_element",
    "trace", "is_in_zero_trace_space", "dof_moments",
    "simplex_rule", "norm_l2", "norm_h1", "weighted_decay_integral",
    "index_subsets", "project_index", "average_poly", "average_eval", "cutoff_poly",
    "cutoff_apply", "cf_poly", "PreconditionError",
    "transform_poly", "transform_sampled", "certify", "BubbleDecomposition", "InvariantError",
    "local_bubble_basis", "local_project", "global_projection", "operator_norm_on_Pr",
]
