"""Exact FJRW rings of invertible potentials and their comparison with Milnor rings of the transpose."""

from .correlators import compute_correlators, resolve_unknowns
from .frobenius import FrobeniusAlgebra, MirrorVerdict, check_frobenius, milnor_nonexistence_check, tensor_product
from .milnor import milnor_ring, quotient_ring
from .mirror import analyze, verify_mirror
from .poly import DegenerateInputError, Polynomial, PolynomialSyntaxError, parse_polynomial, solve_weights, transpose_potential
from .state_space import build_state_space, degree_table
from .symmetry import maximal_symmetry_group

__all__ = [
    "DegenerateInputError",
    "FrobeniusAlgebra",
    "MirrorVerdict",
    "Polynomial",
    "PolynomialSyntaxError",
    "analyze",
    "build_state_space",
    "check_frobenius",
    "compute_correlators",
    "degree_table",
    "maximal_symmetry_group",
    "milnor_nonexistence_check",
    "milnor_ring",
    "parse_polynomial",
    "quotient_ring",
    "resolve_unknowns",
    "solve_weights",
    "tensor_product",
    "transpose_potential",
    "verify_mirror",
]
