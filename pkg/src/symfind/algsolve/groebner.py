"""Buchberger's algorithm over Q(theta), fraction-free.

Pairs are managed with the Gebauer-Moeller criteria and selected by sugar
degree; every reduction strips the Z[theta] content. Step and wall-clock
ceilings raise ``InconclusiveError`` instead of returning partial bases.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..errors import InconclusiveError
from .order import TermOrder
from .poly import SolverRing, divides, lcm_exp, quo_exp


@dataclass
class Limits:
    steps: int = 200_000
    seconds: float = 1800.0
    started: float = field(default_factory=time.monotonic)
    used_steps: int = 0

    def tick(self, what="groebner basis"):
        self.used_steps += 1
        if self.used_steps > self.steps:
            raise InconclusiveError(f"{what}: step limit {self.steps} exceeded", self.used_steps)
        if (self.used_steps & 63) == 0 and time.monotonic() - self.started > self.seconds:
            raise InconclusiveError(f"{what}: time limit {self.seconds:g}s exceeded", self.used_steps)


@dataclass
class GroebnerBasis:
    ring: SolverRing
    order: TermOrder
    polys: list
    reduced: bool = True
    steps: int = 0
    seconds: float = 0.0

    @property
    def generators(self):
        return [self.ring.to_mpoly(p) for p in self.polys]

    def leading_monomials(self):
        return [max(p, key=self.order.key) for p in self.polys]

    def is_unit(self):
        return any(len(p) == 1 and next(iter(p)) == self.ring.zero_exp for p in self.polys)

    def reduce(self, p):
        return normal_form(self.ring, self.order, p, self.polys)

    def contains(self, p):
        return not self.reduce(p)

    def to_json(self):
        names = self.ring.unknowns
        return {
            "order": self.order.describe(names),
            "generators": [self.ring.to_str(p) for p in self.polys],
            "reduced": self.reduced,
            "steps": self.steps,
            "seconds": round(self.seconds, 3),
        }


def _lead(order, p):
    return max(p, key=order.key)


def normal_form(ring: SolverRing, order: TermOrder, p, basis, limits: Limits | None = None, full=True):
    """Fraction-free full reduction: returns ``r`` with ``u*p - r`` in the
    ideal for a nonzero ``u`` in Z[theta]; ``r`` is primitive."""
    D = ring.domain
    key = order.key
    leads = [(_lead(order, g), g) for g in basis if g]
    p = dict(p)
    r = {}
    count = 0
    while p:
        m = max(p, key=key)
        c = p[m]
        red = None
        for lm, g in leads:
            if divides(lm, m):
                red = (lm, g)
                break
        if red is None:
            if not full:
                r = p
                break
            r[m] = c
            del p[m]
            continue
        lm, g = red
        b = g[lm]
        d = D.gcd(c, b)
        bd = D.exquo(b, d)
        cd = D.exquo(c, d)
        shift = quo_exp(m, lm)
        if not D.is_one(bd):
            p = ring.scale(p, bd)
            if r:
                r = ring.scale(r, bd)
        p = ring.sub(p, ring.mul_term(g, shift, cd))
        p.pop(m, None)
        count += 1
        if limits is not None:
            limits.tick("reduction")
        if count % 16 == 0:
            p, r = _joint_primitive(ring, p, r)
    return ring.primitive(r, order)


def _joint_primitive(ring, p, r):
    D = ring.domain
    g = D.zero
    for c in p.values():
        g = D.gcd(g, c)
        if D.is_unit(g):
            return p, r
    for c in r.values():
        g = D.gcd(g, c)
        if D.is_unit(g):
            return p, r
    if D.is_zero(g) or D.is_unit(g):
        return p, r
    return ({e: D.exquo(c, g) for e, c in p.items()}, {e: D.exquo(c, g) for e, c in r.items()})


def spoly(ring, order, f, g):
    D = ring.domain
    lf, lg = _lead(order, f), _lead(order, g)
    L = lcm_exp(lf, lg)
    a, b = f[lf], g[lg]
    d = D.gcd(a, b)
    s = ring.sub(ring.mul_term(f, quo_exp(L, lf), D.exquo(b, d)), ring.mul_term(g, quo_exp(L, lg), D.exquo(a, d)))
    s.pop(L, None)
    return s


def groebner(ring: SolverRing, polys, order: TermOrder | None = None, limits: Limits | None = None,
             reduced=True) -> GroebnerBasis:
    order = order or TermOrder.degrevlex(ring.n)
    limits = limits or Limits()
    t0 = time.monotonic()
    steps0 = limits.used_steps
    F = [ring.primitive(p, order) for p in polys if p]
    F = _dedupe(F)
    if not F:
        return GroebnerBasis(ring, order, [], reduced, 0, 0.0)
    G_all = _buchberger(ring, order, F, limits)
    out = _reduce_basis(ring, order, G_all, limits) if reduced else G_all
    return GroebnerBasis(ring, order, out, reduced, limits.used_steps - steps0, time.monotonic() - t0)


def _dedupe(F):
    seen, out = set(), []
    for p in F:
        k = frozenset((e, _freeze(c)) for e, c in p.items())
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


def _freeze(c):
    return frozenset(c.items()) if isinstance(c, dict) else c


def _buchberger(ring, order, F, limits):
    key = order.key
    # reduce inputs against each other first; small leading monomials first
    F = sorted(F, key=lambda p: key(_lead(order, p)))
    polys, sugar, lms = [], [], []
    G: list[int] = []
    B: set = set()

    def add_poly(h, s):
        i = len(polys)
        polys.append(h)
        sugar.append(s)
        lms.append(_lead(order, h))
        return i

    def update(h):
        nonlocal G, B
        lh = lms[h]
        C = list(G)
        D_ = []
        while C:
            g1 = C.pop()
            l1 = lcm_exp(lh, lms[g1])
            if _coprime(lh, lms[g1]):
                D_.append(g1)
                continue
            if any(divides(lcm_exp(lh, lms[g2]), l1) for g2 in C) or \
               any(divides(lcm_exp(lh, lms[g2]), l1) for g2 in D_):
                continue
            D_.append(g1)
        E = [g for g in D_ if not _coprime(lh, lms[g])]
        B_new = set()
        for (g1, g2) in B:
            L12 = lcm_exp(lms[g1], lms[g2])
            if divides(lh, L12) and lcm_exp(lms[g1], lh) != L12 and lcm_exp(lms[g2], lh) != L12:
                continue
            B_new.add((g1, g2))
        for g in E:
            B_new.add((min(g, h), max(g, h)))
        G = [g for g in G if not divides(lh, lms[g])] + [h]
        B = B_new

    for p in F:
        h = normal_form(ring, order, p, [polys[g] for g in G], limits)
        if h:
            i = add_poly(h, max(sum(e) for e in h))
            update(i)
            if lms[i] == ring.zero_exp:
                return [h]

    while B:
        def pair_key(pr):
            g1, g2 = pr
            L = lcm_exp(lms[g1], lms[g2])
            s = max(sugar[g1] + sum(L) - sum(lms[g1]), sugar[g2] + sum(L) - sum(lms[g2]))
            return (s, key(L), pr)

        pr = min(B, key=pair_key)
        B.discard(pr)
        limits.tick()
        g1, g2 = pr
        s_sugar = pair_key(pr)[0]
        s = spoly(ring, order, polys[g1], polys[g2])
        h = normal_form(ring, order, s, [polys[g] for g in G], limits)
        if h:
            i = add_poly(h, s_sugar)
            if lms[i] == ring.zero_exp:
                return [h]
            update(i)
    return [polys[g] for g in G]


def _coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _reduce_basis(ring, order, G, limits):
    key = order.key
    G = [g for g in G if g]
    if any(_lead(order, g) == ring.zero_exp for g in G):
        return [ring.const(ring.domain.one)]
    # minimal basis
    G = sorted(G, key=lambda p: key(_lead(order, p)))
    minimal = []
    for g in G:
        lg = _lead(order, g)
        if not any(divides(_lead(order, h), lg) for h in minimal):
            minimal = [h for h in minimal if not divides(lg, _lead(order, h))]
            minimal.append(g)
    out = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        out.append(normal_form_tail(ring, order, g, others, limits))
    return sorted(out, key=lambda p: key(_lead(order, p)), reverse=True)


def normal_form_tail(ring, order, g, others, limits=None):
    """Reduce the tail of ``g`` (its leading term is irreducible by ``others``)."""
    lm = _lead(order, g)
    head = {lm: g[lm]}
    tail = dict(g)
    del tail[lm]
    if not tail:
        return ring.primitive(g, order)
    # u*tail - r in ideal; result = u*head + r, which is u*g modulo the ideal
    r, u = _nf_with_multiplier(ring, order, tail, others, limits)
    return ring.primitive(ring.add(ring.scale(head, u), r), order)


def _nf_with_multiplier(ring, order, p, basis, limits=None):
    """Like ``normal_form`` but also returns the multiplier ``u`` (no content removal)."""
    D = ring.domain
    key = order.key
    leads = [(_lead(order, g), g) for g in basis if g]
    p = dict(p)
    r = {}
    u = D.one
    while p:
        m = max(p, key=key)
        c = p[m]
        red = None
        for lm, g in leads:
            if divides(lm, m):
                red = (lm, g)
                break
        if red is None:
            r[m] = c
            del p[m]
            continue
        lm, g = red
        b = g[lm]
        d = D.gcd(c, b)
        bd, cd = D.exquo(b, d), D.exquo(c, d)
        if not D.is_one(bd):
            p = ring.scale(p, bd)
            r = ring.scale(r, bd)
            u = D.mul(u, bd)
        p = ring.sub(p, ring.mul_term(g, quo_exp(m, lm), cd))
        p.pop(m, None)
        if limits is not None:
            limits.tick("reduction")
    return r, u


# certificates ---------------------------------------------------------------


def spoly_certificate(gb: GroebnerBasis) -> bool:
    """Every S-polynomial reduces to zero."""
    P = gb.polys
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            if normal_form(gb.ring, gb.order, spoly(gb.ring, gb.order, P[i], P[j]), P):
                return False
    return True


def membership_certificate(gb: GroebnerBasis, polys) -> bool:
    return all(not gb.reduce(p) for p in polys)


def is_reduced(gb: GroebnerBasis) -> bool:
    leads = gb.leading_monomials()
    for i, p in enumerate(gb.polys):
        for e in p:
            for j, lm in enumerate(leads):
                if j != i and divides(lm, e):
                    return False
        if gb.ring.domain.sign(p[leads[i]]) < 0:
            return False
    return True


def saturate(gb: GroebnerBasis, g, limits: Limits | None = None) -> GroebnerBasis:
    """``I : g^inf`` via an auxiliary unknown ``w`` with ``w*g - 1`` and a
    block order eliminating ``w``; returned in the original order."""
    ring = gb.ring
    D = ring.domain
    if not g:
        raise ValueError("cannot saturate by the zero polynomial")
    if len(g) == 1 and next(iter(g)) == ring.zero_exp:
        return gb
    wname = _fresh(ring, "w_sat")
    ext = ring.extend([wname])
    wi = ext.index(wname)
    gw = ext.sub(ext.mul_term(ring.pad(g, ext), tuple(1 if i == wi else 0 for i in range(ext.n)), D.one),
                 ext.const(D.one))
    polys = [ring.pad(p, ext) for p in gb.polys] + [gw]
    order = TermOrder.block([[wi], list(range(ring.n))])
    big = groebner(ext, polys, order, limits)
    kept = [p for p in big.polys if all(e[wi] == 0 for e in p)]
    back = [{e[:wi] + e[wi + 1:]: c for e, c in p.items()} for p in kept]
    return groebner(ring, back, gb.order, limits)


def _fresh(ring, base):
    name, k = base, 0
    while name in ring.unknowns or name in ring.params:
        k += 1
        name = f"{base}{k}"
    return name
