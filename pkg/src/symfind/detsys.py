"""Finite and infinitesimal determining systems of a control model.

Transformations keep time and inputs fixed:
``x~ = X(t, x, theta)``, ``theta~ = Theta(t, x, theta)`` (``Theta_x = 0`` by
default). Parameters carry the trivial dynamics ``theta' = 0``, so
derivatives with respect to ``theta`` never appear.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cas import MPoly, RatFunc, VarRegistry, substitute
from .errors import ModelError
from .model import TIME, AnalysisOptions, ControlModel


@dataclass(frozen=True)
class JetUnknown:
    """``base`` in {X, Theta, xi, zeta}; ``of`` the state/parameter; ``wrt`` None, 't' or a state."""

    base: str
    of: str
    wrt: str | None
    name: str

    @property
    def order(self):
        return 0 if self.wrt is None else 1

    def describe(self):
        sym = {"X": "X", "Theta": "Theta", "xi": "xi", "zeta": "zeta"}[self.base]
        s = f"{sym}[{self.of}]"
        return s if self.wrt is None else f"d{s}/d{self.wrt}"


def jet_name(base, of, wrt=None):
    prefix = {"X": "X", "Theta": "Th", "xi": "xi", "zeta": "zeta"}[base]
    n = f"{prefix}_{of}"
    return n if wrt is None else f"{n}__{wrt}"


@dataclass
class Condition:
    group: str  # "state", "theta", "output", "fixed"
    target: str  # state, parameter or output name
    expr: RatFunc


@dataclass
class InvarianceConditions:
    kind: str
    model: ControlModel
    options: AnalysisOptions
    ring: VarRegistry
    jets: tuple[JetUnknown, ...]
    conditions: list[Condition]


@dataclass
class DeterminingSystem:
    kind: str  # "finite" | "infinitesimal"
    model: ControlModel
    options: AnalysisOptions
    ring: VarRegistry  # (t, states, params, jets); inputs eliminated
    jets: tuple[JetUnknown, ...]
    equations: list[MPoly]
    labels: list[tuple[str, str, str]]  # (group, target, input monomial)
    cleared_denominators: list[MPoly] = field(default_factory=list)

    def nontrivial(self):
        return [(lab, e) for lab, e in zip(self.labels, self.equations) if not e.is_zero()]

    def count(self, *groups):
        return sum(1 for g, _, _ in self.labels if not groups or g in groups)

    def jet_names(self):
        return [j.name for j in self.jets]

    def identity_bindings(self):
        """Jet values of the identity (finite) or zero (infinitesimal) solution."""
        b = {}
        for j in self.jets:
            if self.kind == "infinitesimal":
                b[j.name] = MPoly.zero(self.ring)
            elif j.wrt is None:
                b[j.name] = MPoly.var(self.ring, j.of)
            else:
                b[j.name] = MPoly.one(self.ring) if j.wrt == j.of else MPoly.zero(self.ring)
        return b

    def to_json(self):
        return {
            "kind": self.kind,
            "model": self.model.name,
            "options": self.options.to_json(),
            "jets": [{"name": j.name, "meaning": j.describe()} for j in self.jets],
            "equations": [
                {"group": g, "target": t, "input_monomial": u, "equation": str(e)}
                for (g, t, u), e in zip(self.labels, self.equations)
            ],
            "cleared_denominators": [str(d) for d in self.cleared_denominators],
        }

    def to_text(self):
        lines = [f"{self.kind} determining system for {self.model.name}"]
        lines.append("jets: " + ", ".join(f"{j.name}={j.describe()}" for j in self.jets))
        for i, ((g, t, u), e) in enumerate(zip(self.labels, self.equations), 1):
            lines.append(f"  [{i}] ({g} {t}, {u}) {e} = 0")
        if self.cleared_denominators:
            lines.append("nonzero: " + ", ".join(str(d) for d in self.cleared_denominators))
        return "\n".join(lines)


def _jets(mdl: ControlModel, opts: AnalysisOptions, kind: str) -> tuple[JetUnknown, ...]:
    sbase, pbase = ("X", "Theta") if kind == "finite" else ("xi", "zeta")
    jets = []
    for s in mdl.states:
        jets.append(JetUnknown(sbase, s, None, jet_name(sbase, s)))
        jets.append(JetUnknown(sbase, s, TIME, jet_name(sbase, s, TIME)))
        for x in mdl.states:
            jets.append(JetUnknown(sbase, s, x, jet_name(sbase, s, x)))
    for p in mdl.params:
        jets.append(JetUnknown(pbase, p, None, jet_name(pbase, p)))
        jets.append(JetUnknown(pbase, p, TIME, jet_name(pbase, p, TIME)))
        if not opts.theta_independent_of_x:
            for x in mdl.states:
                jets.append(JetUnknown(pbase, p, x, jet_name(pbase, p, x)))
    return tuple(jets)


def _condition_ring(mdl, jets):
    return mdl.ring.extend([j.name for j in jets], "jet")


def _total_derivative(ring, mdl, base, of, f_lifted, opts, param=False):
    """``J_t + sum_j J_{x_j} f_j`` for the jet family (base, of)."""
    expr = RatFunc.var(ring, jet_name(base, of, TIME))
    if param and opts.theta_independent_of_x:
        return expr
    for x, fx in zip(mdl.states, f_lifted):
        expr = expr + RatFunc.var(ring, jet_name(base, of, x)) * fx
    return expr


def prolong_finite(mdl: ControlModel, opts: AnalysisOptions | None = None) -> InvarianceConditions:
    """State, parameter-constancy and output invariance conditions with
    ``x'`` replaced by ``f`` and ``theta'`` by 0."""
    opts = opts or AnalysisOptions()
    jets = _jets(mdl, opts, "finite")
    ring = _condition_ring(mdl, jets)
    f = [e.to_ring(ring) for e in mdl.rhs]
    trafo = {s: RatFunc.var(ring, jet_name("X", s)) for s in mdl.states}
    trafo.update({p: RatFunc.var(ring, jet_name("Theta", p)) for p in mdl.params})
    conds = []
    for s, fs in zip(mdl.states, f):
        lhs = _total_derivative(ring, mdl, "X", s, f, opts)
        conds.append(Condition("state", s, lhs - substitute(fs, trafo)))
    for p in mdl.params:
        conds.append(Condition("theta", p, _total_derivative(ring, mdl, "Theta", p, f, opts, param=True)))
    for name, h in mdl.outputs:
        h = h.to_ring(ring)
        conds.append(Condition("output", name, h - substitute(h, trafo)))
    return InvarianceConditions("finite", mdl, opts, ring, jets, conds)


def prolong_infinitesimal(mdl: ControlModel, opts: AnalysisOptions | None = None) -> InvarianceConditions:
    opts = opts or AnalysisOptions()
    jets = _jets(mdl, opts, "infinitesimal")
    ring = _condition_ring(mdl, jets)
    f = [e.to_ring(ring) for e in mdl.rhs]
    xi = {s: RatFunc.var(ring, jet_name("xi", s)) for s in mdl.states}
    zeta = {p: RatFunc.var(ring, jet_name("zeta", p)) for p in mdl.params}

    def apply_v(e: RatFunc) -> RatFunc:
        out = RatFunc.const(ring, 0)
        for s in mdl.states:
            d = e.diff(s)
            if d:
                out = out + xi[s] * d
        for p in mdl.params:
            d = e.diff(p)
            if d:
                out = out + zeta[p] * d
        return out

    conds = []
    for s, fs in zip(mdl.states, f):
        lhs = _total_derivative(ring, mdl, "xi", s, f, opts)
        conds.append(Condition("state", s, lhs - apply_v(fs)))
    for p in mdl.params:
        conds.append(Condition("theta", p, _total_derivative(ring, mdl, "zeta", p, f, opts, param=True)))
    for name, h in mdl.outputs:
        conds.append(Condition("output", name, apply_v(h.to_ring(ring))))
    return InvarianceConditions("infinitesimal", mdl, opts, ring, jets, conds)


def _input_monomials(m: int, degree: int):
    monos = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(m), d):
            e = [0] * m
            for i in combo:
                e[i] += 1
            monos.append(tuple(e))
    return monos


def _format_input_monomial(inputs, e):
    parts = [u if k == 1 else f"{u}^{k}" for u, k in zip(inputs, e) if k]
    return "*".join(parts) if parts else "1"


def collect_input_coefficients(ic: InvarianceConditions, extra: list[Condition] = ()) -> DeterminingSystem:
    """Clear denominators and split every condition by input monomials.

    Each condition contributes one equation per input monomial up to the
    model's input degree (for input-affine models: 1, u_1..u_m), so zero
    coefficients are kept as trivial equations and the count is
    ``(n + l)(m + 1)`` for the unparametrized part.
    """
    mdl = ic.model
    inputs = list(mdl.inputs)
    rest_names = [n for n in ic.ring.names if n not in inputs]
    rest = ic.ring.restrict(rest_names)
    monos = _input_monomials(len(inputs), max(mdl.input_degree, 1 if inputs else 0))
    equations, labels, dens = [], [], []
    for c in list(ic.conditions) + list(extra):
        expr = c.expr
        for u in inputs:
            if expr.den.degree(u) > 0:
                raise ModelError(f"{c.group} condition for {c.target} is not polynomial in input {u}")
        den = expr.den.to_ring(rest)
        if not den.is_constant() and den not in dens:
            dens.append(den)
        coeffs = expr.num.coefficients(inputs, rest) if inputs else {(): expr.num}
        extra_monos = sorted(set(coeffs) - set(monos))
        if extra_monos:
            raise ModelError(f"{c.group} condition for {c.target} exceeds the model's input degree")
        for mono in monos:
            eq = coeffs.get(mono)
            eq = MPoly.zero(rest) if eq is None else eq.to_ring(rest)
            equations.append(eq)
            labels.append((c.group, c.target, _format_input_monomial(inputs, mono)))
    return DeterminingSystem(ic.kind, mdl, ic.options, rest, ic.jets, equations, labels, dens)


def build_finite_detsys(mdl: ControlModel, opts: AnalysisOptions | None = None) -> DeterminingSystem:
    opts = opts or AnalysisOptions()
    opts.check(mdl)
    ic = prolong_finite(mdl, opts)
    extra = [
        Condition("fixed", p, RatFunc.var(ic.ring, jet_name("Theta", p)) - RatFunc.var(ic.ring, p))
        for p in mdl.params if p in opts.fixed_params
    ]
    return collect_input_coefficients(ic, extra)


def build_inf_detsys(mdl: ControlModel, opts: AnalysisOptions | None = None) -> DeterminingSystem:
    opts = opts or AnalysisOptions()
    opts.check(mdl)
    ic = prolong_infinitesimal(mdl, opts)
    extra = [Condition("fixed", p, RatFunc.var(ic.ring, jet_name("zeta", p)))
             for p in mdl.params if p in opts.fixed_params]
    return collect_input_coefficients(ic, extra)
