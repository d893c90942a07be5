"""Exact polynomial-system solving over Q(theta)."""

from .decompose import LINEAR_FORM, Decomposer, SolutionBranch, triangular_decompose
from .domain import IntegerDomain, PolyDomain, make_domain
from .groebner import (GroebnerBasis, Limits, groebner, is_reduced, membership_certificate, normal_form,
                       saturate, spoly_certificate)
from .linear import Nullspace, nullspace
from .order import TermOrder
from .pipeline import SolveResult, UnknownValues, solve
from .poly import SolverRing
from .quotient import Quotient, dimension_and_count, krull_dimension, standard_monomials
from .specialize import specialize_random

__all__ = [
    "LINEAR_FORM",
    "Decomposer",
    "GroebnerBasis",
    "IntegerDomain",
    "Limits",
    "Nullspace",
    "PolyDomain",
    "Quotient",
    "SolutionBranch",
    "SolveResult",
    "SolverRing",
    "TermOrder",
    "UnknownValues",
    "dimension_and_count",
    "groebner",
    "is_reduced",
    "krull_dimension",
    "make_domain",
    "membership_certificate",
    "normal_form",
    "nullspace",
    "saturate",
    "solve",
    "specialize_random",
    "spoly_certificate",
    "standard_monomials",
    "triangular_decompose",
]
