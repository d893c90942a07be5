"""Case splitting on monomial factors, with per-branch saturation.

Each node carries equations, the unknowns known to be nonzero, further
polynomials that must stay nonzero, and the linear eliminations done so far.
An equation ``m * q`` with ``m`` a monomial in the unknowns is split into
``v = 0`` for each ``v | m`` (earlier ones marked nonzero) and ``q = 0``
with all of ``m`` nonzero, so the resulting cases are disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .groebner import GroebnerBasis, Limits, groebner
from .order import TermOrder
from .poly import SolverRing
from .prelim import pre_eliminate

SAT = "w_sat"


@dataclass
class Node:
    polys: list
    nonzero_vars: frozenset = frozenset()
    nonzero: list = field(default_factory=list)
    elims: list = field(default_factory=list)
    path: tuple = ()


@dataclass
class Component:
    """A saturated case: ``basis`` lives in ``ring`` = original unknowns + w."""

    basis: GroebnerBasis
    elims: list
    nonzero: list
    nonzero_vars: frozenset
    path: tuple
    zero_dimensional: bool


def _monomial_content(p):
    e = None
    for m in p:
        e = m if e is None else tuple(map(min, e, m))
    return e


def _is_const(ring, p):
    return len(p) == 1 and next(iter(p)) == ring.zero_exp


class Splitter:
    def __init__(self, ring: SolverRing, priority=None, limits: Limits | None = None, log=None):
        self.ring = ring
        self.ext = ring.extend([SAT])
        self.wi = self.ext.index(SAT)
        self.priority = priority or (lambda i: 0)
        self.limits = limits or Limits()
        self.log = log or (lambda msg: None)
        self.nodes_seen = 0

    # ---------------------------------------------------------------------
    def run(self, polys, nonzero):
        out = []
        stack = [Node(list(polys), frozenset(), list(nonzero), [], ())]
        while stack:
            node = stack.pop()
            self.nodes_seen += 1
            res = self._process(node)
            if res is None:
                continue
            if isinstance(res, list):
                stack.extend(reversed(res))
            else:
                out.append(res)
        return out

    def _process(self, node: Node):
        R = self.ring
        polys, nz, elims = node.polys, node.nonzero, list(node.elims)
        polys, nz, new_elims = pre_eliminate(R, polys, nz, self.priority, self.limits)
        elims += new_elims
        nzv = set(node.nonzero_vars)
        # eliminated unknowns that were required nonzero
        for t, el in enumerate(new_elims):
            i = R.index(el.unknown)
            if i in nzv:
                nzv.discard(i)
                q = el.num
                for later in new_elims[t + 1:]:
                    q = R.substitute_linear(q, R.index(later.unknown), later.num, later.den)
                if not q:
                    return None
                nz.append(R.primitive(q))
        if any(_is_const(R, p) for p in polys):
            return None
        nz2 = []
        for g in nz:
            if not g:
                return None
            if _is_const(R, g):
                continue
            c = _monomial_content(g)
            if len(g) == 1:
                nzv |= {i for i, k in enumerate(c) if k}
                continue
            nz2.append(g)
        nz = nz2
        # drop known-nonzero monomial factors, then split on the rest
        cleaned = []
        for p in polys:
            c = _monomial_content(p)
            if any(c):
                strip = tuple(k if i in nzv else 0 for i, k in enumerate(c))
                if any(strip):
                    p = {tuple(a - b for a, b in zip(e, strip)): v for e, v in p.items()}
            if _is_const(R, p):
                return None
            cleaned.append(p)
        polys = cleaned
        for j, p in enumerate(polys):
            c = _monomial_content(p)
            if not any(c):
                continue
            vars_ = [i for i, k in enumerate(c) if k]
            rest = polys[:j] + polys[j + 1:]
            q = {tuple(a - b for a, b in zip(e, c)): v for e, v in p.items()}
            children = []
            seen = set()
            for i in vars_:
                children.append(Node(rest + [R.var(R.unknowns[i])], frozenset(nzv | seen), list(nz), elims,
                                     node.path + (f"{R.unknowns[i]}=0",)))
                seen.add(i)
            if not _is_const(R, q):
                children.append(Node(rest + [q], frozenset(nzv | seen), list(nz), elims,
                                     node.path + ("monomial factor nonzero",)))
            return children
        return self._saturate(polys, nz, nzv, elims, node.path)

    def _saturate(self, polys, nz, nzv, elims, path):
        R, E = self.ring, self.ext
        D = R.domain
        g = E.const(D.one)
        for q in nz:
            g = E.mul(g, R.pad(q, E))
        for i in sorted(nzv):
            g = E.mul(g, E.var(R.unknowns[i]))
        wvar = E.var(SAT)
        eqs = [R.pad(p, E) for p in polys]
        if not _is_const(E, g):
            eqs.append(E.sub(E.mul(wvar, g), E.const(D.one)))
        else:
            eqs.append(wvar)  # w unused: pin it so dimension counts stay honest
        order = TermOrder.degrevlex(E.n)
        gb = groebner(E, eqs, order, self.limits)
        if gb.is_unit():
            return None
        # a basis element (free of w) with a monomial factor: split again
        back = [self._drop_w(q) for q in gb.polys if all(e[self.wi] == 0 for e in q)]
        if any(any(_monomial_content(q)) for q in back):
            return [Node(back, frozenset(nzv), list(nz), elims, path + ("basis split",))]
        zero_dim = _zero_dimensional(gb, set(range(E.n)) - self._eliminated(elims))
        return Component(gb, elims, nz, frozenset(nzv), path, zero_dim)

    def _eliminated(self, elims):
        return {self.ext.index(el.unknown) for el in elims}

    def _drop_w(self, p):
        wi = self.wi
        return {e[:wi] + e[wi + 1:]: c for e, c in p.items()}


def _zero_dimensional(gb: GroebnerBasis, active):
    leads = gb.leading_monomials()
    for i in active:
        if not any(lm[i] > 0 and all(k == 0 for j, k in enumerate(lm) if j != i) for lm in leads):
            return False
    return True
