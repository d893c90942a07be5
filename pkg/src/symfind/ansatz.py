"""Bounded-degree ansatz: determining PDEs -> finite algebraic / linear systems.

Finite case: ``X_i = sum c_{i,a,b} x^a t^b`` (|a| <= deg_x, b <= deg_t) and
``Theta_j = <p>_tilde``, a plain unknown over Q(theta). Infinitesimal case:
``xi_i = sum a_{i,a,b}(theta) x^a t^b`` and ``zeta_j = sum b_{j,b}(theta) t^b``
with coefficients in Q(theta), which makes every equation linear over Q(theta).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cas import MPoly, VarRegistry
from .detsys import DeterminingSystem, jet_name
from .errors import AnsatzError
from .model import TIME, AnalysisOptions, ControlModel

# fixed seed: x-dependent nondegeneracy constraints are evaluated at one
# pseudo-random rational point, which keeps runs reproducible
_XPOINT_SEED = 20240611


def _monomials(states, deg_x, deg_t):
    out = []
    for d in range(deg_x + 1):
        for combo in itertools.combinations_with_replacement(range(len(states)), d):
            e = [0] * len(states)
            for i in combo:
                e[i] += 1
            for b in range(deg_t + 1):
                out.append((b, tuple(e)))
    return out


def _mono_label(states, tpow, e):
    parts = []
    if tpow:
        parts.append(TIME if tpow == 1 else f"{TIME}p{tpow}")
    for s, k in zip(states, e):
        if k:
            parts.append(s if k == 1 else f"{s}p{k}")
    return "_".join(parts) if parts else "1"


@dataclass
class AnsatzTerm:
    unknown: str
    tpow: int
    xexp: tuple  # exponents over the model states


@dataclass
class FiniteAnsatz:
    model: ControlModel
    options: AnalysisOptions
    state_terms: dict  # state -> list[AnsatzTerm]
    param_terms: dict  # param -> list[AnsatzTerm]
    coefficient_names: tuple
    tilde_names: tuple

    def tilde(self, p):
        return f"{p}_tilde"

    def identity_point(self, params_ring=None):
        """Unknown values realizing X = x, Theta = theta."""
        point = {}
        for s, terms in self.state_terms.items():
            i = self.model.states.index(s)
            for t in terms:
                hit = t.tpow == 0 and sum(t.xexp) == 1 and t.xexp[i] == 1
                point[t.unknown] = 1 if hit else 0
        for p, terms in self.param_terms.items():
            for t in terms:
                point[t.unknown] = ("param", p) if (t.tpow == 0 and not any(t.xexp)) else 0
        return point


def make_finite_ansatz(mdl: ControlModel, opts: AnalysisOptions) -> FiniteAnsatz:
    monos = _monomials(mdl.states, opts.deg_x, opts.deg_t)
    state_terms, coeffs = {}, []
    for s in mdl.states:
        terms = []
        for b, e in monos:
            name = f"c_{s}__{_mono_label(mdl.states, b, e)}"
            terms.append(AnsatzTerm(name, b, e))
            coeffs.append(name)
        state_terms[s] = terms
    param_terms, tildes = {}, []
    zero = (0,) * mdl.n
    for p in mdl.params:
        terms = [AnsatzTerm(f"{p}_tilde", 0, zero)]
        tildes.append(f"{p}_tilde")
        if not opts.theta_independent_of_x:
            for b, e in monos:
                if b == 0 and not any(e):
                    continue
                name = f"d_{p}__{_mono_label(mdl.states, b, e)}"
                terms.append(AnsatzTerm(name, b, e))
                coeffs.append(name)
        param_terms[p] = terms
    return FiniteAnsatz(mdl, opts, state_terms, param_terms, tuple(coeffs), tuple(tildes))


@dataclass
class AlgebraicSystem:
    """Polynomial equations in ``unknowns`` with coefficients in Q[theta].

    ``ring`` = (params, unknowns); ``nondegeneracy`` must stay nonzero;
    ``pointwise`` are (t, x)-dependent constraints checked per solution.
    """

    model: ControlModel
    options: AnalysisOptions
    ansatz: FiniteAnsatz
    ring: VarRegistry
    params: tuple
    unknowns: tuple
    equations: list
    nondegeneracy: list
    nondegeneracy_labels: list
    pointwise: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    # model denominators (over the model ring); specialization avoids their zeros
    denominators: list = field(default_factory=list)
    specialization: dict | None = None

    @property
    def probabilistic(self):
        return self.specialization is not None

    def identity_bindings(self):
        out = {}
        for u, v in self.ansatz.identity_point().items():
            if isinstance(v, tuple):
                out[u] = MPoly.var(self.ring, v[1])
            else:
                out[u] = MPoly.const(self.ring, v)
        return out

    def to_json(self):
        return {
            "params": list(self.params),
            "unknowns": list(self.unknowns),
            "equations": [str(e) for e in self.equations],
            "nondegeneracy": [{"label": lab, "poly": str(g)} for lab, g in zip(self.nondegeneracy_labels, self.nondegeneracy)],
            "pointwise_constraints": [str(g) for g in self.pointwise],
            "notes": list(self.notes),
            "specialization": None if self.specialization is None
            else {k: str(v) for k, v in self.specialization.items()},
        }


def _ansatz_ring(mdl, unknowns, kinds):
    return VarRegistry([TIME, *mdl.states, *mdl.params, *unknowns],
                       ["time"] + ["state"] * mdl.n + ["parameter"] * mdl.k + list(kinds))


def _term_poly(ring, mdl, term: AnsatzTerm):
    exps = {TIME: term.tpow} if term.tpow else {}
    for s, k in zip(mdl.states, term.xexp):
        if k:
            exps[s] = k
    exps[term.unknown] = 1
    return MPoly.monomial(ring, exps)


def _family_bindings(ring, mdl, base, of, terms):
    value = MPoly.zero(ring)
    for t in terms:
        value = value + _term_poly(ring, mdl, t)
    b = {jet_name(base, of): value, jet_name(base, of, TIME): value.diff(TIME)}
    for x in mdl.states:
        b[jet_name(base, of, x)] = value.diff(x)
    return b, value


def determinant(rows):
    """Laplace expansion with memoized minors; entries are MPoly."""
    n = len(rows)
    memo = {}

    def minor(r, cols):
        if r == n:
            return 1
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = 0
        sign = 1
        for j in range(n):
            if not cols & (1 << j):
                continue
            a = rows[r][j]
            if a:
                total = total + sign * a * minor(r + 1, cols & ~(1 << j))
            sign = -sign
        memo[key] = total
        return total

    return minor(0, (1 << n) - 1)


def _collect_tx(poly: MPoly, mdl: ControlModel, target: VarRegistry):
    return poly.coefficients([TIME, *mdl.states], target)


def instantiate_finite(dsys: DeterminingSystem, opts: AnalysisOptions | None = None) -> AlgebraicSystem:
    if dsys.kind != "finite":
        raise ValueError("instantiate_finite needs a finite determining system")
    opts = opts or dsys.options
    mdl = dsys.model
    if opts.deg_x < 1:
        raise AnsatzError("deg_x = 0 forces every transformed state to be a constant; "
                          "observed states cannot be represented")
    az = make_finite_ansatz(mdl, opts)
    unknowns = list(az.coefficient_names) + list(az.tilde_names)
    kinds = ["ansatz-coefficient"] * len(az.coefficient_names) + ["transformed-parameter"] * len(az.tilde_names)
    ring = _ansatz_ring(mdl, unknowns, kinds)
    target = VarRegistry([*mdl.params, *unknowns], ["parameter"] * mdl.k + kinds)
    bindings, values = {}, {}
    for s in mdl.states:
        b, v = _family_bindings(ring, mdl, "X", s, az.state_terms[s])
        bindings.update(b)
        values[s] = v
    for p in mdl.params:
        b, _ = _family_bindings(ring, mdl, "Theta", p, az.param_terms[p])
        bindings.update(b)
    equations, seen = [], set()
    for eq in dsys.equations:
        if eq.is_zero():
            continue
        sub = eq.substitute(bindings, ring)
        for c in _collect_tx(sub, mdl, target).values():
            c = c.primitive()
            if c and c not in seen:
                seen.add(c)
                equations.append(c)
    nondeg, labels, pointwise, notes = [], [], [], []
    jac = determinant([[values[s].diff(x) for x in mdl.states] for s in mdl.states])
    jac = jac if isinstance(jac, MPoly) else MPoly.const(ring, jac)
    _add_nondegeneracy(jac, "jacobian", mdl, target, nondeg, labels, pointwise, notes)
    for d in dsys.cleared_denominators:
        sub = d.substitute(bindings, ring)
        if not (sub.variables() & set(unknowns)):
            continue
        _add_nondegeneracy(sub, "cleared denominator", mdl, target, nondeg, labels, pointwise, notes,
                           evaluate=False)
    dens = []
    for e in list(mdl.rhs) + [h for _, h in mdl.outputs]:
        if not e.den.is_constant() and e.den not in dens:
            dens.append(e.den)
    return AlgebraicSystem(mdl, opts, az, target, tuple(mdl.params), tuple(unknowns),
                           equations, nondeg, labels, pointwise, notes, dens)


def _add_nondegeneracy(poly, label, mdl, target, nondeg, labels, pointwise, notes, evaluate=True):
    tx = {TIME, *mdl.states}
    if not (poly.variables() & tx):
        g = poly.to_ring(target).primitive()
        if not g.is_constant():
            nondeg.append(g)
            labels.append(label)
        return
    pointwise.append(poly)
    if evaluate:
        rng = random.Random(_XPOINT_SEED)
        point = {v: Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for v in sorted(tx)}
        g = poly.partial_eval(point).to_ring(target).primitive()
        if not g.is_constant():
            nondeg.append(g)
            labels.append(f"{label} at a sample point")
            notes.append(f"{label} depends on (t, x); nondegeneracy enforced at one rational sample point")


# --------------------------------------------------------------------------
# infinitesimal


@dataclass
class LinearCoefficientSystem:
    """Homogeneous rows ``{column: coefficient MPoly over params}``."""

    model: ControlModel
    options: AnalysisOptions
    params_ring: VarRegistry
    columns: tuple  # unknown coefficient names
    column_info: dict  # name -> (kind 'xi'|'zeta', of, tpow, xexp)
    rows: list

    def to_json(self):
        return {
            "columns": list(self.columns),
            "rows": [{self.columns[j]: str(c) for j, c in sorted(r.items())} for r in self.rows],
        }


def instantiate_infinitesimal(dsys: DeterminingSystem, opts: AnalysisOptions | None = None) -> LinearCoefficientSystem:
    if dsys.kind != "infinitesimal":
        raise ValueError("instantiate_infinitesimal needs an infinitesimal determining system")
    opts = opts or dsys.options
    mdl = dsys.model
    monos = _monomials(mdl.states, opts.deg_xi, opts.deg_t)
    xi_terms, zeta_terms, info = {}, {}, {}
    for s in mdl.states:
        xi_terms[s] = []
        for b, e in monos:
            name = f"a_{s}__{_mono_label(mdl.states, b, e)}"
            xi_terms[s].append(AnsatzTerm(name, b, e))
            info[name] = ("xi", s, b, e)
    zero = (0,) * mdl.n
    for p in mdl.params:
        zeta_terms[p] = []
        zmonos = monos if not opts.theta_independent_of_x else [(b, zero) for b in range(opts.deg_t + 1)]
        for b, e in zmonos:
            name = f"b_{p}__{_mono_label(mdl.states, b, e)}"
            zeta_terms[p].append(AnsatzTerm(name, b, e))
            info[name] = ("zeta", p, b, e)
    columns = tuple(info)
    ring = _ansatz_ring(mdl, columns, ["ansatz-coefficient"] * len(columns))
    bindings = {}
    for s in mdl.states:
        bindings.update(_family_bindings(ring, mdl, "xi", s, xi_terms[s])[0])
    for p in mdl.params:
        bindings.update(_family_bindings(ring, mdl, "zeta", p, zeta_terms[p])[0])
    params_ring = VarRegistry(mdl.params, "parameter")
    coeff_ring = VarRegistry([*mdl.params, *columns], ["parameter"] * mdl.k + ["ansatz-coefficient"] * len(columns))
    rows, seen = [], set()
    for eq in dsys.equations:
        if eq.is_zero():
            continue
        sub = eq.substitute(bindings, ring)
        for c in _collect_tx(sub, mdl, coeff_ring).values():
            row = {}
            for mono, coef in c.coefficients(columns, params_ring).items():
                if sum(mono) != 1:
                    raise AssertionError("infinitesimal equation is not linear homogeneous")
                row[mono.index(1)] = coef
            if row:
                key = frozenset((j, v) for j, v in _primitive_row(row).items())
                if key not in seen:
                    seen.add(key)
                    rows.append(row)
    return LinearCoefficientSystem(mdl, opts, params_ring, columns, info, rows)


def _primitive_row(row):
    """Row divided by the gcd of its entries, sign fixed by the first entry."""
    from .cas.ratfunc import multivariate_gcd

    g = None
    for v in row.values():
        g = v if g is None else multivariate_gcd(g, v)
    out = {j: v.divexact(g) for j, v in row.items()}
    if out[min(out)].leading_coefficient() < 0:
        out = {j: -v for j, v in out.items()}
    return out
