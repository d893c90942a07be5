import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symfind.algsolve import (Limits, SolverRing, dimension_and_count, groebner, is_reduced, membership_certificate,
                              nullspace, saturate, solve, specialize_random, spoly_certificate, triangular_decompose)
from symfind.algsolve.decompose import LINEAR_FORM
from symfind.ansatz import LinearCoefficientSystem
from symfind.cas import MPoly, VarRegistry
from symfind.errors import InconclusiveError
from symfind.model import parse_expression

from conftest import ZERO_DIM, finite_system, solved


def make_ring(unknowns, params=()):
    return SolverRing(unknowns, VarRegistry(list(params), "parameter"))


def P(ring, text):
    return ring.from_mpoly(parse_expression(text, ring.registry).as_poly())


def strs(ring, gb):
    return sorted(ring.to_str(p) for p in gb.polys)


# ------------------------------------------------------------ examples

def test_groebner_examples():
    R = make_ring(["x"])
    assert strs(R, groebner(R, [P(R, "x^2 - 1"), P(R, "x - 1")])) == ["x - 1"]
    R = make_ring(["c", "d"])
    assert strs(R, groebner(R, [P(R, "c - 1"), P(R, "c*d - 2")])) == ["c - 1", "d - 2"]


def test_groebner_over_parameter_field():
    R = make_ring(["k1_tilde"], ["k1"])
    gb = groebner(R, [P(R, "k1_tilde^2 + k1^2")])
    assert strs(R, gb) == ["k1^2 + k1_tilde^2"]
    assert dimension_and_count(gb) == {"zero_dimensional": True, "count": 2, "dimension": 0}


def test_saturate_examples():
    R = make_ring(["c"])
    gb = groebner(R, [P(R, "c*(c - 1)")])
    assert strs(R, saturate(gb, P(R, "c"))) == ["c - 1"]
    assert saturate(gb, P(R, "1")).polys == gb.polys
    with pytest.raises(ValueError):
        saturate(gb, {})


def test_step_limit_is_inconclusive():
    R = make_ring(["x", "y", "z"])
    polys = [P(R, "x^2*y - z + 1"), P(R, "y^2*z - x + 2"), P(R, "z^2*x - y + 3")]
    with pytest.raises(InconclusiveError):
        groebner(R, polys, limits=Limits(steps=3))


def test_triangular_decompose_splits_factorable_univariate():
    R = make_ring(["c"])
    branches = triangular_decompose(groebner(R, [P(R, "c^2 - 1")]))
    assert sorted(str(b.value("c")) for b in branches) == ["-1", "1"]
    assert all(b.degree == 1 for b in branches)
    irreducible = triangular_decompose(groebner(R, [P(R, "c^2 + 1")]))
    assert [b.degree for b in irreducible] == [2] and irreducible[0].real is False
    with pytest.raises(ValueError):
        triangular_decompose(groebner(make_ring(["a", "b"]), [P(make_ring(["a", "b"]), "a*b")]))


def test_nullspace_of_zero_matrix():
    params = VarRegistry([], "parameter")
    lin = LinearCoefficientSystem(None, None, params, ("a", "b", "c"), {}, [])
    assert nullspace(lin).dimension == 3


def test_nullspace_small_system():
    params = VarRegistry(["th"], "parameter")
    th = MPoly.var(params, "th")
    # th*a - b = 0, a + c = 0 over Q(th): 1-dimensional, spanned by (1, th, -1)
    lin = LinearCoefficientSystem(None, None, params, ("a", "b", "c"), {},
                                  [{0: th, 1: MPoly.const(params, -1)}, {0: MPoly.one(params), 2: MPoly.one(params)}])
    ns = nullspace(lin)
    assert ns.dimension == 1
    (v,) = ns.vectors
    assert v["b"] == v["a"] * th and v["c"] == -v["a"]


def test_corpus_counts():
    expected = {"decay": 1, "decay_theta": 1, "signflip": 2, "goodwin": 8, "goodwin_m2": 4, "goodwin_m3": 6,
                "goodwin_m5": 10, "mammillary4": 6, "seirq": 2}
    for name, count in expected.items():
        _, res, _ = solved(name)
        assert res.zero_dimensional and res.count == count, name
    _, llw, _ = solved("llw1987")
    assert not llw.zero_dimensional and llw.count is None


def test_goodwin_branches():
    asys, res, _ = solved("goodwin")
    assert sorted(b.degree for b in res.branches) == [1, 1, 1, 1, 2, 2]
    assert "jacobian" in asys.nondegeneracy_labels
    for b in res.branches:
        if b.degree == 2:
            assert b.real is False
            assert b.defining_relation() == "k1^2 + k1_tilde^2"


def test_mammillary_branches_are_rational():
    _, res, _ = solved("mammillary4")
    assert [b.degree for b in res.branches] == [1] * 6


# ------------------------------------------------------------ corpus properties

def _components(name):
    asys, res, _ = solved(name)
    return asys, res, [c for c in res.components if c.zero_dimensional]


def _with_elims(ring, p, elims):
    for el in elims:
        i = ring.index(el.unknown)
        if any(e[i] for e in p):
            p = ring.substitute_linear(p, i, el.num, el.den)
    return p


@pytest.mark.parametrize("name", ZERO_DIM)
def test_groebner_certificates(name):
    asys, res, comps = _components(name)
    S = SolverRing(asys.unknowns, res.params)
    for c in comps:
        assert spoly_certificate(c.basis)
        assert is_reduced(c.basis)
        originals = [S.pad(_with_elims(S, S.from_mpoly(e), c.elims), c.basis.ring) for e in asys.equations]
        assert membership_certificate(c.basis, [p for p in originals if p])


@pytest.mark.parametrize("name", ZERO_DIM)
def test_branch_degrees_sum_to_quotient_dimension(name):
    _, res, _ = solved(name)
    assert sum(b.degree for b in res.branches) == sum(res.quotient_dimensions) == res.count
    for c, q in zip(res.components, res.quotient_dimensions):
        assert sum(b.degree for b in res.branches if b.path == c.path) == q


@pytest.mark.parametrize("name", ZERO_DIM)
def test_branches_pairwise_disjoint(name):
    asys, res, _ = solved(name)
    ring = SolverRing(tuple(asys.unknowns) + ("s_a", "s_b"), res.params)
    eqs = [b.triangular_equations(ring, "s_a") for b in res.branches]
    for i, j in itertools.combinations(range(len(res.branches)), 2):
        joint = res.branches[i].triangular_equations(ring, "s_a") + res.branches[j].triangular_equations(ring, "s_b")
        assert groebner(ring, joint).is_unit(), (i, j)
    # each branch alone is consistent and of the stated degree
    for b, e in zip(res.branches, eqs):
        gb = groebner(ring, e)
        assert not gb.is_unit()
        active = [ring.index(u) for u in asys.unknowns]
        if b.primitive == LINEAR_FORM:
            active.append(ring.index("s_a"))
        assert dimension_and_count(gb, active)["count"] == b.degree


@pytest.mark.parametrize("name", ZERO_DIM)
def test_specialization_agrees_with_generic_count(name):
    asys, res, _ = solved(name)
    for seed in range(5):
        spec = specialize_random(asys, seed)
        assert spec.probabilistic and not spec.params
        assert solve(spec).count == res.count, seed


def test_specialization_rejects_colliding_point():
    asys = finite_system("seirq")
    calls = []

    def sampler(rng, name):
        calls.append(name)
        # the first draw puts nu = gamma
        if len(calls) <= len(asys.params):
            return Fraction(1, 2)
        return Fraction(rng.randint(1, 50), rng.randint(1, 9))

    ring = VarRegistry(["nu", "gamma"], "parameter")
    collision = parse_expression("nu - gamma", ring).as_poly()
    spec = specialize_random(asys, 3, sampler=sampler, avoid=[collision])
    assert len(calls) > len(asys.params)
    assert spec.specialization["nu"] != spec.specialization["gamma"]


# ------------------------------------------------------------ oracle: sympy

terms = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
small_polys = st.dictionaries(terms, st.integers(-3, 3).filter(bool), min_size=1, max_size=4)


def _to_sympy(d, gens):
    return sum(c * gens[0] ** e[0] * gens[1] ** e[1] * gens[2] ** e[2] for e, c in d.items())


@given(st.lists(small_polys, min_size=1, max_size=3))
def test_groebner_matches_sympy(system):
    R = make_ring(["x", "y", "z"])
    ours = groebner(R, [dict(p) for p in system], limits=Limits(steps=20_000))
    assert spoly_certificate(ours)
    assert membership_certificate(ours, [dict(p) for p in system])
    x, y, z = sympy.symbols("x y z")
    theirs = sympy.groebner([_to_sympy(p, (x, y, z)) for p in system], x, y, z, order="grevlex", domain="QQ")
    mine = [_to_sympy({e: int(c) for e, c in p.items()}, (x, y, z)) for p in ours.polys]
    assert all(theirs.contains(q) for q in mine)
    assert all(ours.contains(R.from_mpoly(MPoly(R.registry, {e: c for e, c in _exps(g, (x, y, z))})))
               for g in theirs.exprs)
    # independent count of standard monomials from sympy's leading terms
    ours_dc = dimension_and_count(ours)
    if theirs.exprs == [1]:
        assert ours_dc["count"] == 0
    elif theirs.is_zero_dimensional:
        leads = [sympy.Poly(g, x, y, z).monoms(order="grevlex")[0] for g in theirs.exprs]
        box = range(0, 12)
        count = sum(1 for m in itertools.product(box, box, box)
                    if not any(all(a >= b for a, b in zip(m, lm)) for lm in leads))
        assert ours_dc == {"zero_dimensional": True, "count": count, "dimension": 0}
    else:
        assert not ours_dc["zero_dimensional"]


def _exps(g, gens):
    poly = sympy.Poly(g, *gens)
    den = sympy.ilcm(1, 1, *[sympy.fraction(c)[1] for c in poly.coeffs()])
    for m, c in zip(poly.monoms(), poly.coeffs()):
        yield m, int(c * den)


def test_random_univariate_counts():
    rng = random.Random(5)
    R = make_ring(["c"])
    for _ in range(10):
        roots = [rng.randint(-5, 5) for _ in range(rng.randint(1, 4))]
        text = "*".join(f"(c - ({r}))" for r in roots)
        branches = triangular_decompose(groebner(R, [P(R, text)]))
        assert sorted(int(str(b.value("c"))) for b in branches) == sorted(set(roots))
