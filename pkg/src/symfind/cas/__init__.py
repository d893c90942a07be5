"""Exact arithmetic kernel: rationals, sparse polynomials, rational functions."""

from .mpoly import MPoly, Rational, as_rational, grlex_key
from .ratfunc import RatFunc, multivariate_gcd, ratfunc_normalize, substitute
from .registry import KINDS, VarRegistry


def poly_arith(a: MPoly, b: MPoly, op: str) -> MPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_diff(p: MPoly, var: str) -> MPoly:
    return p.diff(var)


__all__ = [
    "KINDS",
    "MPoly",
    "RatFunc",
    "Rational",
    "VarRegistry",
    "as_rational",
    "grlex_key",
    "multivariate_gcd",
    "poly_arith",
    "poly_diff",
    "ratfunc_normalize",
    "substitute",
]
