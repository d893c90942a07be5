"""Polynomials in the unknowns with Z[theta] coefficients (fraction-free)."""

from __future__ import annotations

from operator import add, sub

from ..cas import MPoly, RatFunc, VarRegistry
from .domain import make_domain


class SolverRing:
    """Unknown names plus the parameter registry and coefficient domain.

    Polynomials are plain dicts ``{unknown exponent tuple: coefficient}``.
    """

    def __init__(self, unknowns, params: VarRegistry, domain=None):
        self.unknowns = tuple(unknowns)
        self.params = params
        self.domain = domain or make_domain(params)
        self.n = len(self.unknowns)
        self.zero_exp = (0,) * self.n
        self._index = {u: i for i, u in enumerate(self.unknowns)}
        self.registry = VarRegistry([*params.names, *self.unknowns],
                                    ["parameter"] * len(params) + ["ansatz-coefficient"] * self.n)

    def index(self, name):
        return self._index[name]

    def extend(self, names):
        """Ring with extra unknowns appended (existing exponents are padded)."""
        return SolverRing(self.unknowns + tuple(names), self.params, self.domain)

    def pad(self, p, ring: "SolverRing"):
        """Re-embed ``p`` into ``ring`` whose unknowns contain ours."""
        if ring.unknowns == self.unknowns:
            return p
        pos = [ring.index(u) for u in self.unknowns]
        out = {}
        for e, c in p.items():
            f = [0] * ring.n
            for i, k in zip(pos, e):
                f[i] = k
            out[tuple(f)] = c
        return out

    # construction ---------------------------------------------------------
    def var(self, name, coef=None):
        e = [0] * self.n
        e[self._index[name]] = 1
        return {tuple(e): self.domain.one if coef is None else coef}

    def const(self, c):
        return {self.zero_exp: c} if not self.domain.is_zero(c) else {}

    def from_mpoly(self, p: MPoly):
        """MPoly over (params, unknowns) -> fraction-free dict (content kept)."""
        p = p.primitive() if not p.is_zero() else p
        out = {}
        for e, coef in p.coefficients(self.unknowns, self.params).items():
            out[e] = self.domain.from_mpoly(coef)
        return out

    def to_mpoly(self, p, registry: VarRegistry | None = None) -> MPoly:
        reg = registry or self.registry
        total = MPoly.zero(reg)
        D = self.domain
        for e, c in p.items():
            mono = MPoly.monomial(reg, {u: k for u, k in zip(self.unknowns, e) if k})
            total = total + mono * D.to_mpoly(c, reg)
        return total

    def to_str(self, p):
        return str(self.to_mpoly(p)) if p else "0"

    # arithmetic -----------------------------------------------------------
    def add(self, a, b):
        D = self.domain
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = D.add(v, c)
                if D.is_zero(v):
                    del out[e]
                else:
                    out[e] = v
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        D = self.domain
        return {e: D.neg(c) for e, c in a.items()}

    def scale(self, a, c):
        D = self.domain
        if D.is_one(c):
            return a
        return {e: D.mul(v, c) for e, v in a.items()}

    def mul_term(self, a, mono, c):
        D = self.domain
        if D.is_one(c):
            return {tuple(map(add, e, mono)): v for e, v in a.items()}
        return {tuple(map(add, e, mono)): D.mul(v, c) for e, v in a.items()}

    def mul(self, a, b):
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for e, c in a.items():
            out = self.add(out, self.mul_term(b, e, c))
        return out

    def pow(self, a, k):
        out = self.const(self.domain.one)
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return out

    def content(self, p):
        D = self.domain
        g = D.zero
        for c in p.values():
            g = D.gcd(g, c)
            if D.is_unit(g):
                return D.one
        return g

    def primitive(self, p, order=None):
        """Divide out the Z[theta]-content; fix the sign of the leading coefficient."""
        if not p:
            return p
        D = self.domain
        g = self.content(p)
        lead = p[max(p, key=order.key)] if order is not None else p[max(p)]
        if not D.is_one(g):
            p = {e: D.exquo(c, g) for e, c in p.items()}
            lead = D.exquo(lead, g)
        if D.sign(lead) < 0:
            p = {e: D.neg(c) for e, c in p.items()}
        return p

    def degree(self, p, name=None):
        if name is None:
            return max((sum(e) for e in p), default=0)
        i = self._index[name]
        return max((e[i] for e in p), default=0)

    def used(self, p):
        used = set()
        for e in p:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return used

    def coefficient_in(self, p, i):
        """``{k: coefficient poly}`` grouping ``p`` by powers of unknown ``i``."""
        out = {}
        for e, c in p.items():
            k = e[i]
            f = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[f] = c
        return out

    def substitute_linear(self, p, i, num, den):
        """``den^deg * p(u_i = num/den)``; ``num`` a polynomial free of u_i, ``den`` a coefficient."""
        groups = self.coefficient_in(p, i)
        if not groups or set(groups) == {0}:
            return p
        d = max(groups)
        D = self.domain
        out = {}
        num_pows = [self.const(D.one)]
        for _ in range(d):
            num_pows.append(self.mul(num_pows[-1], num))
        den_pows = [D.one]
        for _ in range(d):
            den_pows.append(D.mul(den_pows[-1], den))
        for k, q in groups.items():
            out = self.add(out, self.scale(self.mul(q, num_pows[k]), den_pows[d - k]))
        return out

    def evaluate_params(self, p, point, target: "SolverRing"):
        """Specialize theta at ``point`` (rationals); result primitive over Z."""
        from fractions import Fraction
        from math import lcm

        vals = {}
        for e, c in p.items():
            v = self.domain.evaluate(c, point)
            if v:
                vals[e] = Fraction(v)
        if not vals:
            return {}
        L = lcm(*(v.denominator for v in vals.values()))
        return {e: int(v * L) for e, v in vals.items()}

    def coef_ratfunc(self, c) -> RatFunc:
        return self.domain.to_ratfunc(c)


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def lcm_exp(a, b):
    return tuple(map(max, a, b))


def quo_exp(a, b):
    return tuple(map(sub, a, b))
