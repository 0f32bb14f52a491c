"""Bochner-technique toolkit: curvature operators on forms, pinching,
Feynman-Kac estimates and combinatorial Hodge gaps."""

from .curvature import RiemannTensor, constant_curvature, random_tensor, ricci, sectional
from .errors import DomainError, NumericError, SymmetryError
from .hodge import SimplicialComplex, check_interlacing, hodge_laplacian
from .multiindex import enumerate_indices, overlap_matrix, perron_eigenvalue
from .pinching import extremize_sum, is_pinched, pinch_constant, product_example
from .stochastic import domination_check, feynman_kac, r_underline_q, ssp_rate
from .weitzenbock import FormOperator, assemble, eigenvalues, min_eigenvalue

__version__ = "0.1.0"

__all__ = [
    "RiemannTensor", "constant_curvature", "random_tensor", "ricci", "sectional",
    "DomainError", "NumericError", "SymmetryError",
    "SimplicialComplex", "check_interlacing", "hodge_laplacian",
    "enumerate_indices", "overlap_matrix", "perron_eigenvalue",
    "extremize_sum", "is_pinched", "pinch_constant", "product_example",
    "domination_check", "feynman_kac", "r_underline_q", "ssp_rate",
    "FormOperator", "assemble", "eigenvalues", "min_eigenvalue",
]
