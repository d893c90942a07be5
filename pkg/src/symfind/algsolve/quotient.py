"""Linear algebra in the quotient ring Q(theta)[u]/I of a zero-dimensional ideal.

Elements are coordinate vectors (lists of RatFunc) over the standard
monomials of a Groebner basis.
"""

from __future__ import annotations

from ..cas import RatFunc
from .groebner import GroebnerBasis, _nf_with_multiplier
from .poly import divides


def standard_monomials(gb: GroebnerBasis, active, cap=100_000):
    """Monomials (in ``active`` unknowns) not divisible by any leading monomial.

    Returns None if the set is infinite (more than ``cap``).
    """
    n = gb.ring.n
    leads = gb.leading_monomials()
    zero = (0,) * n
    if any(lm == zero for lm in leads):
        return []
    out, frontier, seen = [], [zero], {zero}
    while frontier:
        nxt = []
        for m in frontier:
            out.append(m)
            if len(out) > cap:
                return None
            for i in active:
                e = m[:i] + (m[i] + 1,) + m[i + 1:]
                if e in seen:
                    continue
                seen.add(e)
                if not any(divides(lm, e) for lm in leads):
                    nxt.append(e)
        frontier = nxt
    key = gb.order.key
    return sorted(out, key=key)


def dimension_and_count(gb: GroebnerBasis, active=None):
    """``{"zero_dimensional": bool, "count": int | None}`` (count with multiplicity)."""
    n = gb.ring.n
    active = list(range(n)) if active is None else list(active)
    leads = gb.leading_monomials()
    if gb.is_unit():
        return {"zero_dimensional": True, "count": 0}
    for i in active:
        if not any(lm[i] > 0 and all(k == 0 for j, k in enumerate(lm) if j != i) for lm in leads):
            return {"zero_dimensional": False, "count": None, "dimension": krull_dimension(gb, active)}
    return {"zero_dimensional": True, "count": len(standard_monomials(gb, active)), "dimension": 0}


def krull_dimension(gb: GroebnerBasis, active):
    """Largest set of active unknowns whose monomials avoid all leading monomials."""
    leads = [lm for lm in gb.leading_monomials()]
    active = list(active)
    best = 0

    def independent(S):
        return not any(all(lm[i] == 0 for i in range(len(lm)) if i not in S) for lm in leads)

    def grow(S, start):
        nonlocal best
        best = max(best, len(S))
        for j in range(start, len(active)):
            T = S | {active[j]}
            if independent(T):
                grow(T, j + 1)

    grow(frozenset(), 0)
    return best


class Quotient:
    def __init__(self, gb: GroebnerBasis, active):
        self.gb = gb
        self.ring = gb.ring
        self.params = self.ring.params
        self.active = list(active)
        basis = standard_monomials(gb, self.active)
        if basis is None:
            raise ValueError("ideal is not zero-dimensional")
        self.basis = basis
        self.dim = len(basis)
        self.pos = {m: i for i, m in enumerate(basis)}
        self._mulvar = {}
        self.zero_rf = RatFunc.const(self.params, 0)
        self.one_rf = RatFunc.const(self.params, 1)

    # conversions ---------------------------------------------------------
    def nf(self, p):
        """Vector of the normal form of a fraction-free polynomial ``p``."""
        r, u = _nf_with_multiplier(self.ring, self.gb.order, p, self.gb.polys)
        D = self.ring.domain
        ur = D.to_ratfunc(u)
        vec = [self.zero_rf] * self.dim
        for e, c in r.items():
            vec[self.pos[e]] = D.to_ratfunc(c) / ur
        return vec

    def unit(self):
        return self.nf(self.ring.const(self.ring.domain.one))

    def var(self, i):
        e = [0] * self.ring.n
        e[i] = 1
        return self.nf({tuple(e): self.ring.domain.one})

    def const(self, c: RatFunc):
        v = self.unit()
        return [c * x for x in v]

    # arithmetic ----------------------------------------------------------
    def _column(self, i, j):
        key = (i, j)
        col = self._mulvar.get(key)
        if col is None:
            m = self.basis[j]
            e = m[:i] + (m[i] + 1,) + m[i + 1:]
            if e in self.pos:
                col = {self.pos[e]: self.one_rf}
            else:
                vec = self.nf({e: self.ring.domain.one})
                col = {k: v for k, v in enumerate(vec) if v}
            self._mulvar[key] = col
        return col

    def mul_var(self, vec, i):
        out = [self.zero_rf] * self.dim
        for j, a in enumerate(vec):
            if not a:
                continue
            for k, v in self._column(i, j).items():
                out[k] = out[k] + a * v
        return out

    def add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def scale(self, a, c):
        return [x * c for x in a]

    def mul(self, a, b):
        out = [self.zero_rf] * self.dim
        for j, c in enumerate(a):
            if not c:
                continue
            t = b
            for i, k in enumerate(self.basis[j]):
                for _ in range(k):
                    t = self.mul_var(t, i)
            out = [x + c * y for x, y in zip(out, t)]
        return out

    def power(self, a, k):
        out = self.unit()
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def is_zero(self, a):
        return not any(a)

    def from_poly_rf(self, p_rf: dict):
        """Element from ``{exponent: RatFunc}`` over the ring's unknowns."""
        out = [self.zero_rf] * self.dim
        for e, c in p_rf.items():
            t = self.unit()
            for i, k in enumerate(e):
                for _ in range(k):
                    t = self.mul_var(t, i)
            out = [x + c * y for x, y in zip(out, t)]
        return out

    # minimal polynomials ---------------------------------------------------
    def minpoly(self, a):
        """Monic minimal polynomial of ``a`` as coefficient list (low to high)."""
        rows = []  # (pivot, vector, combination over powers)
        power = self.unit()
        k = 0
        while True:
            vec = list(power)
            comb = {k: self.one_rf}
            for piv, rv, rc in rows:
                c = vec[piv]
                if c:
                    vec = [x - c * y for x, y in zip(vec, rv)]
                    for d, v in rc.items():
                        comb[d] = comb.get(d, self.zero_rf) - c * v
            piv = next((i for i, x in enumerate(vec) if x), None)
            if piv is None:
                return [comb.get(d, self.zero_rf) for d in range(k + 1)]
            inv = vec[piv].inverse()
            vec = [x * inv for x in vec]
            comb = {d: v * inv for d, v in comb.items()}
            rows.append((piv, vec, comb))
            k += 1
            power = self.mul(power, a)

    def coordinates_in_powers(self, a, p, degree):
        """Coefficients ``r_k`` with ``a = sum r_k p^k`` (``1, p, ..`` a basis)."""
        powers = [self.unit()]
        for _ in range(degree - 1):
            powers.append(self.mul(powers[-1], p))
        return solve_columns(powers, a, self.zero_rf)


def solve_columns(cols, target, zero):
    """Solve ``sum x_k cols[k] = target`` exactly (columns independent)."""
    n = len(cols)
    m = len(target)
    # augmented matrix rows
    A = [[cols[k][i] for k in range(n)] + [target[i]] for i in range(m)]
    piv_rows = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            raise ValueError("columns are dependent")
        A[r], A[p] = A[p], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv_rows.append(r)
        r += 1
    for i in range(r, m):
        if A[i][n]:
            raise ValueError("target is not in the span")
    return [A[i][n] for i in range(n)]
