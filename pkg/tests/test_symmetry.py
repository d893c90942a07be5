import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symfind.analysis import analyze
from symfind.ansatz import determinant
from symfind.cas import RatFunc
from symfind.errors import SymfindError
from symfind.model import AnalysisOptions, parse_expression
from symfind.symmetry import (Bounds, SymmetryTransformation, biological_filter, classify, compose, group_structure,
                              identity_transformation, name_group, parse_inequality, parse_interval,
                              transformation_ring)

from conftest import SEIRQ_OPTS, ZERO_DIM, model, solved


def element(mdl, states=None, params=None, id="h"):
    """Explicit element from expression strings; unspecified names map to themselves."""
    ring = transformation_ring(mdl)
    smaps = {s: parse_expression((states or {}).get(s, s), ring) for s in mdl.states}
    pmaps = {p: parse_expression((params or {}).get(p, p), ring) for p in mdl.params}
    tr = SymmetryTransformation(id, mdl, ring, smaps, pmaps)
    tr.is_identity = not tr.moved()
    return tr


def find(trs, other):
    hits = [t for t in trs if t.explicit and t.state_maps == other.state_maps and t.param_maps == other.param_maps]
    return hits[0] if hits else None


MAMMILLARY_TRIPLES = [("k12", "k13", "k14"), ("k21", "k31", "k41"), ("x2", "x3", "x4")]


def permutation_element(mdl, perm):
    """Simultaneous index permutation: the name at position i maps to the name at perm[i]."""
    states, params = {}, {}
    for triple in MAMMILLARY_TRIPLES:
        for i, name in enumerate(triple):
            target = states if name.startswith("x") else params
            target[name] = triple[perm[i]]
    return element(mdl, states, params, id=str(perm))


# ------------------------------------------------------------ extraction

def test_mammillary_elements_are_the_index_permutations():
    asys, _, trs = solved("mammillary4")
    mdl = asys.model
    assert len(trs) == 6 and all(t.explicit and t.degree == 1 for t in trs)
    for perm in itertools.permutations(range(3)):
        assert find(trs, permutation_element(mdl, perm)) is not None, perm
    # the representative 3-cycle
    cyc = element(mdl, {"x2": "x3", "x3": "x4", "x4": "x2"},
                  {"k12": "k13", "k13": "k14", "k14": "k12", "k21": "k31", "k31": "k41", "k41": "k21"})
    assert find(trs, cyc) is not None


def test_goodwin_swap_element():
    asys, _, trs = solved("goodwin")
    swap = element(asys.model, {"Y": "Y + (Z/k1)*(k2 - k3)"}, {"k2": "k3", "k3": "k2"})
    assert find(trs, swap) is not None
    alg = [t for t in trs if not t.explicit]
    assert len(alg) == 2 and all(t.degree == 2 and t.real is False for t in alg)
    for t in alg:
        assert t.relation == parse_expression(f"{t.primitive}^2 + k1^2", t.ring).as_poly()


@pytest.mark.parametrize("name", ZERO_DIM)
def test_identity_first_and_jacobian_nonzero(name):
    asys, _, trs = solved(name)
    assert trs[0].is_identity and trs[0].moved() == []
    assert sum(1 for t in trs if t.is_identity) == 1
    mdl = asys.model
    for t in trs:
        jac = determinant([[t.state_maps[s].diff(x) for x in mdl.states] for s in mdl.states])
        assert isinstance(jac, RatFunc) and not jac.is_zero(), t.id


def test_round_trip_through_json():
    asys, _, trs = solved("goodwin")
    for t in trs:
        back = SymmetryTransformation.from_json(asys.model, t.to_json())
        assert back.state_maps == t.state_maps and back.param_maps == t.param_maps
        assert back.relation == t.relation


# ------------------------------------------------------------ composition

def test_compose_examples():
    asys, _, trs = solved("goodwin")
    mdl = asys.model
    swap = find(trs, element(mdl, {"Y": "Y + (Z/k1)*(k2 - k3)"}, {"k2": "k3", "k3": "k2"}))
    comp, match = compose(swap, swap, trs)
    assert comp.is_identity and match is trs[0]
    e = identity_transformation(mdl)
    comp, match = compose(e, swap, trs)
    assert match is swap
    with pytest.raises(SymfindError):
        compose(swap, next(t for t in trs if not t.explicit))


def test_compose_three_cycles():
    _, _, trs = solved("mammillary4")
    mdl = trs[0].model
    cyc = find(trs, permutation_element(mdl, (1, 2, 0)))
    inv = find(trs, permutation_element(mdl, (2, 0, 1)))
    assert compose(cyc, cyc, trs)[1] is inv
    assert compose(cyc, inv, trs)[0].is_identity


def test_composition_matches_permutation_oracle():
    _, _, trs = solved("mammillary4")
    mdl = trs[0].model
    perms = list(itertools.permutations(range(3)))
    for p, q in itertools.product(perms, perms):
        a = find(trs, permutation_element(mdl, p))
        b = find(trs, permutation_element(mdl, q))
        # a maps name i to name p[i]; evaluated at the images of b that becomes q[p[i]]
        pq = tuple(q[p[i]] for i in range(3))
        assert compose(a, b, trs)[1] is find(trs, permutation_element(mdl, pq))


# ------------------------------------------------------------ groups

@pytest.mark.parametrize("name, order, gname, abelian", [
    ("mammillary4", 6, "S3", False),
    ("goodwin", 8, "C4xC2", True),
    ("goodwin_m2", 4, "C2xC2", True),
    ("goodwin_m3", 6, "C6", True),
    ("goodwin_m5", 10, "C10", True),
    ("signflip", 2, "C2", True),
    ("seirq", 2, "C2", True),
    ("decay", 1, "C1", True),
])
def test_group_structure(name, order, gname, abelian):
    asys, _, trs = solved(name)
    g = group_structure(asys.model, trs)
    assert (g.order, g.name, g.abelian) == (order, gname, abelian)
    assert not g.warnings
    assert len(g.element_orders) == order and all(order % k == 0 for k in g.element_orders)


def test_goodwin_element_orders():
    asys, _, trs = solved("goodwin")
    g = group_structure(asys.model, trs)
    assert g.element_orders == [1, 2, 2, 2, 4, 4, 4, 4]
    assert not g.exact


def test_trivial_group():
    mdl = model("decay")
    g = group_structure(mdl, [identity_transformation(mdl)])
    assert (g.order, g.name, g.element_orders) == (1, "C1", [1])


def test_name_group_catalog():
    assert name_group([1, 2, 2, 2, 4, 4, 4, 4], True) == "C4xC2"
    assert name_group([1, 2, 2, 2, 3, 3], False) == "S3"
    assert name_group([1, 2, 2, 2, 2, 2, 4, 4], False) == "D4"
    assert name_group([1, 2, 4, 4, 4, 4, 4, 4], False) == "Q8"
    assert name_group([1, 2, 3, 3, 6, 6], True) == "C6"
    assert name_group([1, 5, 7], True) is None


@given(st.sets(st.integers(0, 5), min_size=1))
def test_subsets_warn_exactly_when_not_a_group(indices):
    _, _, trs = solved("mammillary4")
    mdl = trs[0].model
    sub = [trs[i] for i in sorted(indices)]
    g = group_structure(mdl, sub)
    ids = {t.id for t in sub}
    closed = all(compose(a, b, trs)[1].id in ids for a in sub for b in sub)
    assert closed == (not g.warnings)
    for a in sub:
        has_inverse = any(compose(a, b, trs)[0].is_identity for b in sub)
        warned = any(w.startswith(f"{a.id} has no inverse") for w in g.warnings)
        assert has_inverse != warned or not any(t.is_identity for t in sub)
    if closed:
        assert all(len(sub) % k == 0 for k in g.element_orders)


# ------------------------------------------------------------ classification

def test_classify_mammillary():
    asys, _, trs = solved("mammillary4")
    v = classify(asys.model, transformations=trs)
    assert {n for n, x in v.items() if x.code == "global"} == {"x1", "k01"}
    assert {n for n, x in v.items() if x.code == "sling"} == {"x2", "x3", "x4", "k12", "k13", "k14", "k21",
                                                               "k31", "k41"}
    assert "w.r.t. symmetries within the ansatz bounds" in v["x1"].label


def test_classify_llw():
    rep = analyze(model("llw1987"))
    codes = {n: v.code for n, v in rep.verdicts.items()}
    assert codes["th1"] == codes["th3"] == "sling"
    for n in ("x1", "x2", "th2", "th4"):
        assert codes[n] == "unidentifiable"


def test_classify_seirq():
    mdl = model("seirq")
    rep = analyze(mdl, AnalysisOptions(**SEIRQ_OPTS))
    codes = {n: v.code for n, v in rep.verdicts.items()}
    assert codes == {"S": "sling", "E": "sling", "I": "sling", "Q": "global", "R": "unknown",
                     "beta": "sling", "nu": "sling", "psi": "sling", "gamma": "unknown"}
    assert rep.verdicts["beta"].label == "SLING"
    assert rep.verdicts["S"].label == "locally but not globally observable"


@given(st.sets(st.integers(0, 5)))
def test_fewer_elements_never_demote_global(indices):
    asys, _, trs = solved("goodwin")
    full = classify(asys.model, transformations=trs)
    sub = classify(asys.model, transformations=[trs[i] for i in indices])
    for n, v in full.items():
        if v.code == "global":
            assert sub[n].code == "global"


# ------------------------------------------------------------ bounds

def test_interval_and_inequality_parsing():
    assert parse_interval("gamma=0:1") == ("gamma", (Fraction(0), Fraction(1)))
    assert parse_interval("nu=:1/2") == ("nu", (None, Fraction(1, 2)))
    with pytest.raises(SymfindError):
        parse_interval("gamma")
    mdl = model("seirq")
    assert parse_inequality("gamma > nu", mdl) == parse_expression("gamma - nu", mdl.ring)
    assert parse_inequality("gamma < nu", mdl) == parse_expression("nu - gamma", mdl.ring)
    with pytest.raises(SymfindError):
        Bounds.build(mdl, intervals={"delta": (0, 1)})


def test_goodwin_biological_filter():
    asys, _, trs = solved("goodwin")
    mdl = asys.model
    kept, discarded = biological_filter(mdl, trs, Bounds.build(mdl, positive=True))
    reasons = dict(discarded)
    assert sum(1 for r in reasons.values() if r == "non-real") == 2
    v = classify(mdl, transformations=kept)
    assert v["Z"].code == "global" and v["k1"].code == "global"
    assert v["Y"].code == v["k2"].code == v["k3"].code == "sling"


def test_seirq_biological_filter():
    mdl = model("seirq")
    iv = {p: (Fraction(0), Fraction(1)) for p in ("gamma", "nu", "psi")}
    bounds = Bounds.build(mdl, positive=True, intervals=iv, constraints=["gamma > nu"])
    rep = analyze(mdl, AnalysisOptions(**SEIRQ_OPTS), bounds=bounds)
    bio = rep.biological
    assert [t.id for t in bio["kept"]] == ["g0"]
    assert {n: v.code for n, v in bio["verdicts"].items() if n not in ("R", "gamma")} == \
        dict.fromkeys(["S", "E", "I", "Q", "beta", "nu", "psi"], "global")
