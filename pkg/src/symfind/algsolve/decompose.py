"""Prime decomposition of zero-dimensional components into solution branches.

Each branch is a prime ideal over Q(theta) in shape position: one primitive
element ``p`` with irreducible minimal polynomial ``q`` of degree ``d`` and
every unknown written as a polynomial of degree < d in ``p``. A branch has
exactly ``d`` solutions over the algebraic closure, and distinct branches
are disjoint.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..cas import MPoly, RatFunc
from ..errors import SolverBugError
from .factor import factor_univariate
from .groebner import GroebnerBasis, Limits, groebner
from .poly import SolverRing
from .quotient import Quotient, dimension_and_count

LINEAR_FORM = "s_prim"


@dataclass
class SolutionBranch:
    degree: int
    params: object  # VarRegistry
    unknowns: tuple  # reported unknowns (no auxiliaries)
    values: dict  # unknown -> list[RatFunc] coefficients in powers of the primitive element
    primitive: str | None = None  # unknown name or LINEAR_FORM
    primitive_form: dict | None = None  # unknown -> int for a linear-form primitive
    minpoly: list | None = None  # primitive Z[theta] coefficients (MPoly), low -> high
    real: bool | None = True
    path: tuple = ()
    quotient_dimension: int = 1
    pointwise_ok: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def rational(self):
        return self.degree == 1

    def value(self, u) -> RatFunc:
        if not self.rational:
            raise ValueError("branch is algebraic; use values[u] with the primitive element")
        return self.values[u][0]

    def defining_relation(self) -> str | None:
        if self.rational:
            return None
        from .factor import format_univariate
        name = self.primitive
        return str(format_univariate(self.minpoly, name, self.params))

    def triangular_equations(self, ring: SolverRing, form_name=LINEAR_FORM):
        """Fraction-free polynomials (in ``ring``) cutting out the branch.

        ``form_name`` renames a linear-form primitive so that several
        branches can share one ring.
        """
        D = ring.domain
        out = []
        pvar = None
        if not self.rational:
            pvar = form_name if self.primitive == LINEAR_FORM else self.primitive
            coeffs = [D.from_mpoly(c) for c in self.minpoly]
            out.append(_univariate(ring, pvar, coeffs))
            if self.primitive == LINEAR_FORM:
                form = ring.var(pvar)
                for u, k in self.primitive_form.items():
                    form = ring.sub(form, ring.var(u, D.from_int(k)))
                out.append(form)
        for u in self.unknowns:
            if u == pvar:
                continue
            coeffs = self.values[u]
            L = _common_den(coeffs, self.params)
            poly = ring.var(u, D.from_mpoly(L))
            for k, c in enumerate(coeffs):
                if not c:
                    continue
                num = (c.num * L.divexact(c.den))
                term = ring.const(D.from_mpoly(num))
                if k:
                    term = ring.mul(term, ring.pow(ring.var(pvar), k))
                poly = ring.sub(poly, term)
            out.append(ring.primitive(poly))
        return out

    def to_json(self):
        vals = {}
        for u in self.unknowns:
            cs = self.values[u]
            if self.rational:
                vals[u] = str(cs[0])
            else:
                vals[u] = [str(c) for c in cs]
        d = {"degree": self.degree, "rational": self.rational, "real": self.real, "values": vals}
        if not self.rational:
            d["primitive"] = self.primitive
            d["defining_relation"] = self.defining_relation()
            if self.primitive_form:
                d["primitive_form"] = dict(self.primitive_form)
        return d


def _common_den(coeffs, params):
    from ..cas.ratfunc import multivariate_gcd

    L = MPoly.one(params)
    for c in coeffs:
        if c and not c.den.is_constant():
            g = multivariate_gcd(L, c.den)
            L = (L * c.den).divexact(g)
        elif c:
            d = c.den.constant_value()
            if d != 1:
                L = L * d
    return L


def _univariate(ring, name, coeffs):
    out = {}
    x = ring.var(name)
    power = ring.const(ring.domain.one)
    for k, c in enumerate(coeffs):
        if not ring.domain.is_zero(c):
            out = ring.add(out, ring.scale(power, c))
        power = ring.mul(power, x)
    return out


def _compose(ring, coeffs, element_poly):
    out = {}
    power = ring.const(ring.domain.one)
    for c in coeffs:
        if not ring.domain.is_zero(c):
            out = ring.add(out, ring.scale(power, c))
        power = ring.mul(power, element_poly)
    return out


class Decomposer:
    """Splits zero-dimensional components by factoring minimal polynomials."""

    def __init__(self, ring: SolverRing, reported, preference, elims_of, limits: Limits | None = None,
                 seed=0, realness_points=3):
        self.ring = ring
        self.reported = tuple(reported)
        self.preference = list(preference)  # unknown indices, most preferred primitive first
        self.elims_of = elims_of
        self.limits = limits or Limits()
        self.rng = random.Random(seed)
        self.realness_points = realness_points

    def decompose(self, gb: GroebnerBasis, elims, path=()):
        ring = self.ring
        eliminated = {el.unknown for el in elims}
        active = [i for i in range(ring.n) if ring.unknowns[i] not in eliminated]
        branches = []
        stack = [gb]
        while stack:
            g = stack.pop()
            if g.is_unit():
                continue
            Q = Quotient(g, active)
            kind, payload = self._analyze(Q, active)
            if kind == "split":
                for extra in payload:
                    stack.append(groebner(ring, g.polys + [extra], g.order, self.limits))
                continue
            branches.append(self._branch(Q, payload, elims, path))
        return branches

    def _analyze(self, Q: Quotient, active):
        ring = self.ring
        D = Q.dim
        if D == 1:
            return "prime", None
        params = ring.params
        prim = None
        order = [i for i in self.preference if i in active] + [i for i in active if i not in self.preference]
        for i in order:
            mu = Q.minpoly(Q.var(i))
            deg = len(mu) - 1
            if deg == 1:
                continue
            facs = factor_univariate(mu, params)
            if len(facs) > 1 or facs[0][1] > 1:
                ui = ring.unknowns[i]
                polys = [_univariate(ring, ui, [ring.domain.from_mpoly(c) for c in f]) for f, _ in facs]
                return "split", polys
            if deg == D and prim is None:
                prim = (ring.unknowns[i], None, [c for c in facs[0][0]])
        if prim is not None:
            return "prime", prim
        # no unknown generates the quotient: try random linear forms
        cands = [i for i in active if ring.unknowns[i] in self.reported]
        for _ in range(12):
            form = {ring.unknowns[i]: self.rng.randint(-9, 9) or 1 for i in cands}
            lin = {}
            for u, k in form.items():
                lin = ring.add(lin, ring.var(u, ring.domain.from_int(k)))
            el = Q.nf(lin)
            mu = Q.minpoly(el)
            if len(mu) - 1 < D:
                continue
            facs = factor_univariate(mu, params)
            if len(facs) > 1 or facs[0][1] > 1:
                polys = [_compose(ring, [ring.domain.from_mpoly(c) for c in f], lin) for f, _ in facs]
                return "split", polys
            return "prime", (LINEAR_FORM, form, list(facs[0][0]))
        raise SolverBugError("no primitive element found for a radical zero-dimensional component")

    def _branch(self, Q: Quotient, prim, elims, path):
        ring = self.ring
        params = ring.params
        D = Q.dim
        values_el = {}
        for i, u in enumerate(ring.unknowns):
            if u not in {el.unknown for el in elims}:
                values_el[u] = Q.var(i)
        for el in reversed(elims):
            acc = Q.const(RatFunc.const(params, 0))
            for e, c in el.num.items():
                t = Q.const(ring.domain.to_ratfunc(c))
                for u, k in zip(ring.unknowns, e):
                    for _ in range(k):
                        t = Q.mul(t, values_el[u])
                acc = Q.add(acc, t)
            values_el[el.unknown] = Q.scale(acc, ring.domain.to_ratfunc(el.den).inverse())
        if prim is None:
            values = {u: [values_el[u][0]] for u in self.reported}
            return SolutionBranch(1, params, self.reported, values, path=path, quotient_dimension=1)
        name, form, mpolys = prim
        if form is None:
            pel = values_el[name]
        else:
            pel = Q.const(RatFunc.const(params, 0))
            for u, k in form.items():
                pel = Q.add(pel, Q.scale(values_el[u], RatFunc.const(params, k)))
        values = {u: Q.coordinates_in_powers(values_el[u], pel, D) for u in self.reported}
        br = SolutionBranch(D, params, self.reported, values, name, form, mpolys, None, path, D)
        br.real = self._realness(mpolys)
        return br

    def _realness(self, mpolys):
        import numpy as np

        params = self.ring.params
        rng = random.Random(1234567)
        verdicts = []
        for _ in range(self.realness_points):
            point = {p: Fraction(rng.randint(1, 97), rng.randint(1, 13)) for p in params.names}
            coeffs = [float(c.eval(point)) for c in mpolys]
            roots = np.roots(coeffs[::-1])
            scale = max(1.0, max(abs(r) for r in roots))
            real = [abs(r.imag) < 1e-9 * scale for r in roots]
            verdicts.append(True if all(real) else (False if not any(real) else None))
        if all(v is True for v in verdicts):
            return True
        if all(v is False for v in verdicts):
            return False
        return None


def triangular_decompose(gb: GroebnerBasis, limits: Limits | None = None, seed=0):
    """Branches of a zero-dimensional ideal given by ``gb`` (all unknowns reported)."""
    ring = gb.ring
    if not dimension_and_count(gb)["zero_dimensional"]:
        raise ValueError("triangular decomposition needs a zero-dimensional ideal")
    dec = Decomposer(ring, ring.unknowns, list(range(ring.n)), None, limits, seed)
    return dec.decompose(gb, [])
