"""Discrete symmetry transformations, their group structure, and verdicts."""

from .classify import (QUALIFIER, Bounds, Generator, Verdict, biological_filter, classify,
                       generators_from_nullspace, parse_inequality, parse_interval)
from .group import SymmetryGroup, compose, group_structure, name_group, numeric_table
from .transform import SymmetryTransformation, extract_transformations, identity_transformation, transformation_ring

__all__ = [
    "QUALIFIER",
    "Bounds",
    "Generator",
    "SymmetryGroup",
    "SymmetryTransformation",
    "Verdict",
    "biological_filter",
    "classify",
    "compose",
    "extract_transformations",
    "generators_from_nullspace",
    "group_structure",
    "identity_transformation",
    "name_group",
    "numeric_table",
    "parse_inequality",
    "parse_interval",
    "transformation_ring",
]
