from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symfind.detsys import build_finite_detsys, build_inf_detsys, jet_name, prolong_finite
from symfind.model import TIME, AnalysisOptions, parse_expression

from conftest import CORPUS, model, prepared


def generator_bindings(ds, xi, zeta):
    """Jet values of the vector field with components ``xi``/``zeta`` (expression strings)."""
    mdl = ds.model
    b = {}
    for base, comps in (("xi", xi), ("zeta", zeta)):
        for of, text in comps.items():
            v = parse_expression(text, ds.ring).as_poly()
            b[jet_name(base, of)] = v
            for wrt in (TIME, *mdl.states):
                name = jet_name(base, of, wrt)
                if name in ds.ring:
                    b[name] = v.diff(wrt)
    return b


def test_prolong_decay_by_hand():
    mdl = model("decay")
    ic = prolong_finite(mdl)
    R = ic.ring
    state, output = ic.conditions
    # X_t + X_x * (-x) - (-X) and x - X
    assert state.expr == parse_expression("X_x__t - x*X_x__x + X_x", R)
    assert output.expr == parse_expression("x - X_x", R)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_identity_solves_finite_system(name):
    mdl, opts = prepared(name, **CORPUS[name])
    ds = build_finite_detsys(mdl, opts)
    ident = ds.identity_bindings()
    for (label, eq) in ds.nontrivial():
        assert eq.substitute(ident, ds.ring).is_zero(), label


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_zero_section_solves_infinitesimal_system(name):
    mdl, opts = prepared(name, **CORPUS[name])
    ds = build_inf_detsys(mdl, opts)
    zero = ds.identity_bindings()
    assert all(eq.substitute(zero, ds.ring).is_zero() for eq in ds.equations)
    # every infinitesimal equation is linear homogeneous in the jets
    jets = ds.jet_names()
    for eq in ds.equations:
        assert all(sum(e[ds.ring.index(j)] for j in jets) == 1 for e in eq.terms)


def test_inputs_are_eliminated_and_counted():
    mdl = model("mammillary4")
    ds = build_finite_detsys(mdl)
    assert "u" not in ds.ring
    assert ds.count("state", "output") == (mdl.n + mdl.l) * (mdl.m + 1) == 10
    assert ds.count("theta") == mdl.k * (mdl.m + 1)
    assert {u for _, _, u in ds.labels} == {"1", "u"}


def test_goodwin_has_no_input_splitting():
    mdl = model("goodwin")
    ds = build_finite_detsys(mdl)
    assert ds.count("state") == 3 and ds.count("output") == 1
    assert {u for _, _, u in ds.labels} == {"1"}
    (out,) = [e for (g, _, _), e in zip(ds.labels, ds.equations) if g == "output"]
    # the output condition is algebraic: no derivative jets
    assert out.variables() == {"X", "X_X"}
    assert out == parse_expression("X - X_X", ds.ring).as_poly() or out == parse_expression("X_X - X", ds.ring).as_poly()


def test_llw_x3_condition_splits_by_input():
    ds = build_finite_detsys(model("llw1987"))
    x3 = {u: e for (g, t, u), e in zip(ds.labels, ds.equations) if g == "state" and t == "x3"}
    assert set(x3) == {"1", "u"}
    assert not x3["1"].is_zero() and not x3["u"].is_zero()
    assert "X_x1" in x3["u"].variables() and "Th_th4" in x3["u"].variables()


def test_llw_scaling_generator_satisfies_infinitesimal_system():
    ds = build_inf_detsys(model("llw1987"))
    b = generator_bindings(ds, {"x1": "-x1", "x2": "x2", "x3": "0"},
                           {"th1": "0", "th2": "-th2", "th3": "0", "th4": "th4"})
    for label, eq in ds.nontrivial():
        assert eq.substitute(b, ds.ring).is_zero(), label


@given(st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(bool))
def test_infinitesimal_solutions_form_a_linear_space(c):
    ds = build_inf_detsys(model("llw1987"))
    good = generator_bindings(ds, {"x1": f"-({c})*x1", "x2": f"({c})*x2", "x3": "0"},
                              {"th1": "0", "th2": f"-({c})*th2", "th3": "0", "th4": f"({c})*th4"})
    assert all(eq.substitute(good, ds.ring).is_zero() for eq in ds.equations)
    bad = generator_bindings(ds, {"x1": f"({c})*x1", "x2": f"({c})*x2", "x3": "0"},
                             {"th1": "0", "th2": "0", "th3": "0", "th4": "0"})
    assert any(not eq.substitute(bad, ds.ring).is_zero() for eq in ds.equations)


def test_decay_theta_admits_only_the_zero_generator():
    ds = build_inf_detsys(model("decay_theta"))
    # xi = a*x, zeta = b: the state condition forces a = 0 then b*x = 0
    for a, b in [("1", "0"), ("0", "1"), ("2", "-3")]:
        bind = generator_bindings(ds, {"x": f"{a}*x"}, {"theta": b})
        assert any(not eq.substitute(bind, ds.ring).is_zero() for eq in ds.equations)


def test_decay_finite_system_only_identity():
    """Brute force over X = a*x + b with rational a, b in a small grid."""
    ds = build_finite_detsys(model("decay"))
    grid = [Fraction(k, 2) for k in range(-4, 5)]
    found = []
    for a in grid:
        for b in grid:
            X = parse_expression(f"({a})*x + ({b})", ds.ring).as_poly()
            bind = {"X_x": X, "X_x__t": X.diff(TIME), "X_x__x": X.diff("x")}
            if all(eq.substitute(bind, ds.ring).is_zero() for eq in ds.equations):
                found.append((a, b))
    assert found == [(1, 0)]


def test_fixed_parameter_adds_an_equation():
    mdl, opts = prepared("seirq", fixed_params=("gamma",), removed_states=("R",))
    ds = build_finite_detsys(mdl, opts)
    fixed = [e for (g, _, _), e in zip(ds.labels, ds.equations) if g == "fixed"]
    assert fixed == [parse_expression("Th_gamma - gamma", ds.ring).as_poly()]


def test_theta_may_depend_on_x():
    opts = AnalysisOptions(theta_independent_of_x=False)
    ds = build_finite_detsys(model("decay_theta"), opts)
    assert "Th_theta__x" in ds.jet_names()
    assert "Th_theta__x" not in build_finite_detsys(model("decay_theta")).jet_names()
