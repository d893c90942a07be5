from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symfind.cas import (MPoly, RatFunc, VarRegistry, multivariate_gcd, poly_arith, poly_diff, ratfunc_normalize,
                         substitute)
from symfind.errors import RegistryMismatchError, ZeroDenominatorError
from symfind.model import parse_expression

R = VarRegistry(["x", "y", "z"], "state")
K = VarRegistry(["Z", "k1", "k1_tilde", "k2", "k3"], "auxiliary")


def P(text, ring=R):
    return parse_expression(text, ring).as_poly()


def F(text, ring=R):
    return parse_expression(text, ring)


coeffs = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=4))
exps = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(exps, coeffs, max_size=5).map(lambda d: MPoly(R, d))
nonzero_polys = polys.filter(lambda p: not p.is_zero())


# ------------------------------------------------------------ examples

def test_poly_arith_examples():
    assert poly_arith(P("x + 1"), P("x - 1"), "mul") == P("x^2 - 1")
    p = P("3*x*y - z^2")
    assert poly_arith(p, MPoly.zero(R), "add") == p
    assert poly_arith(P("(k2 - k3)*Z", K), P("k3*Z", K), "add") == P("k2*Z", K)


def test_poly_arith_rejects_mixed_registries():
    with pytest.raises(RegistryMismatchError):
        poly_arith(P("x"), P("Z", K), "add")
    with pytest.raises(ValueError):
        poly_arith(P("x"), P("y"), "div")


def test_poly_diff_examples():
    assert poly_diff(P("Z^4", K), "Z") == P("4*Z^3", K)
    ring = VarRegistry(["x1", "x2", "x3", "k21"])
    assert poly_diff(P("k21*x1", ring), "x2").is_zero()
    assert poly_diff(P("x1*x2 - x3", ring), "x1") == P("x2", ring)


def test_ratfunc_normalize_examples():
    assert ratfunc_normalize(P("x^2 - 1"), P("x - 1")) == F("x + 1")
    zero = ratfunc_normalize(MPoly.zero(R), P("x*y + 3"))
    assert zero.num.is_zero() and zero.den == MPoly.one(R)
    half = ratfunc_normalize(P("2*x"), MPoly.const(R, 4))
    assert half == F("x/2")
    with pytest.raises(ZeroDenominatorError):
        ratfunc_normalize(P("x"), MPoly.zero(R))


def test_substitute_hill_function():
    hill = F("1/(1 + Z^4)", K)
    moved = substitute(hill, {"Z": F("-(k1/k1_tilde)*Z", K)})
    assert moved == F("1/(1 + k1^4*Z^4/k1_tilde^4)", K)
    # equal to the original on k1_tilde^4 = k1^4, e.g. k1_tilde = -k1
    assert substitute(moved, {"k1_tilde": F("-k1", K)}) == hill


def test_substitute_examples():
    assert substitute(F("x"), {"x": F("x")}) == F("x")
    # (x + y)/y at y = 1/x is (x + 1/x) * x = x^2 + 1
    assert substitute(F("(x + y)/y"), {"y": F("1/x")}) == F("x^2 + 1")
    with pytest.raises(ZeroDenominatorError):
        substitute(F("1/(x - y)"), {"y": F("x")})


def test_gcd_examples():
    assert multivariate_gcd(P("x^2 - 1"), P("x - 1")) == P("x - 1")
    p = P("3*x*y + 6")
    assert multivariate_gcd(p, MPoly.zero(R)) == p.monic()
    ring = VarRegistry(["k1", "k2"])
    assert multivariate_gcd(P("k1^2*k2 + k1^2", ring), P("k1^3", ring)) == P("k1^2", ring)


# ------------------------------------------------------------ properties

@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == MPoly.zero(R)
    assert a * MPoly.one(R) == a


@given(polys, polys, st.sampled_from(["x", "y", "z"]), st.integers(-3, 3))
def test_diff_linear_and_leibniz(a, b, v, k):
    assert (a * k + b).diff(v) == a.diff(v) * k + b.diff(v)
    assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


@given(polys, nonzero_polys, st.sampled_from(["x", "y", "z"]))
def test_ratfunc_quotient_rule(a, b, v):
    f = RatFunc(a, b)
    assert f.diff(v) == (RatFunc(a.diff(v)) * b - RatFunc(b.diff(v)) * a) / RatFunc(b * b)


@given(polys, nonzero_polys)
def test_normalize_idempotent_and_canonical(a, b):
    f = ratfunc_normalize(a, b)
    assert ratfunc_normalize(f.num, f.den) == f
    assert f.num == RatFunc(f.num, f.den).num
    # scaling numerator and denominator by a common factor does not change the result
    g = ratfunc_normalize(a * P("x + 2"), b * P("x + 2"))
    assert g == f
    assert f.den.leading_coefficient() > 0


@given(polys, st.integers(-4, 4))
def test_substitute_shift_inverse(a, k):
    shifted = substitute(a, {"x": F(f"x + ({k})")})
    assert substitute(shifted, {"x": F(f"x - ({k})")}) == RatFunc(a)


@given(polys, polys)
def test_substitute_is_a_homomorphism(a, b):
    b_x = {"x": F("y*z - 1"), "y": F("x/(z + 1)")}
    lhs = substitute(RatFunc(a * b + a), b_x)
    assert lhs == substitute(a, b_x) * substitute(b, b_x) + substitute(a, b_x)


@given(polys, st.fractions(min_value=-3, max_value=3, max_denominator=5),
       st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_eval_matches_partial_eval(a, vx, vy):
    vals = {"x": vx, "y": vy, "z": Fraction(1, 3)}
    assert a.eval(vals) == a.partial_eval({"x": vx}).partial_eval({"y": vy}).eval({"z": Fraction(1, 3)})


@given(nonzero_polys, nonzero_polys)
def test_gcd_divides_both(a, b):
    g = multivariate_gcd(a, b)
    assert g.divides(a) and g.divides(b)
    c = P("x + y^2 + 1")
    assert multivariate_gcd(a * c, b * c) == (g * c).monic()
