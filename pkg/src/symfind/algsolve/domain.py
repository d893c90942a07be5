"""Coefficient rings for the solver: Z (specialized runs) and Z[theta].

Polynomials over Q(theta) are stored fraction-free: coefficients live in
Z[theta] and every polynomial is kept primitive (content over Z[theta]
removed), so a polynomial stands for its whole class of Q(theta)-multiples.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..cas import MPoly, RatFunc, VarRegistry
from ..cas import sparse as sp
from ..cas.gcd import int_poly_gcd


class IntegerDomain:
    """Plain Python ints; used when no parameters remain."""

    nparams = 0

    def __init__(self, params: VarRegistry | None = None):
        self.params = params or VarRegistry([], [])

    zero = 0
    one = 1

    def from_int(self, c):
        return int(c)

    @staticmethod
    def is_zero(a):
        return a == 0

    @staticmethod
    def is_one(a):
        return a == 1

    @staticmethod
    def is_unit(a):
        return a == 1 or a == -1

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def exquo(a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact division")
        return q

    @staticmethod
    def gcd(a, b):
        return gcd(a, b)

    @staticmethod
    def sign(a):
        return -1 if a < 0 else 1

    @staticmethod
    def is_constant(a):
        return True

    def size(self, a):
        return abs(a).bit_length()

    def to_mpoly(self, a, ring=None):
        return MPoly.const(ring or self.params, a)

    def to_ratfunc(self, a):
        return RatFunc.const(self.params, a)

    def from_mpoly(self, p: MPoly):
        if not p.is_constant():
            raise ValueError("non-constant coefficient in a specialized system")
        c = Fraction(p.constant_value())
        if c.denominator != 1:
            raise ValueError("coefficient must be integral")
        return c.numerator

    def evaluate(self, a, point):
        return a

    def degree(self, a):
        return 0

    def variables(self, a):
        return set()


class PolyDomain:
    """Z[theta] as ``{exponent tuple: int}`` dicts (no zero entries)."""

    def __init__(self, params: VarRegistry):
        self.params = params
        self.nparams = len(params)
        self._origin = (0,) * self.nparams
        self.zero = {}
        self.one = {self._origin: 1}

    def from_int(self, c):
        return {self._origin: int(c)} if c else {}

    @staticmethod
    def is_zero(a):
        return not a

    def is_one(self, a):
        return len(a) == 1 and a.get(self._origin) == 1

    def is_unit(self, a):
        return len(a) == 1 and a.get(self._origin) in (1, -1)

    @staticmethod
    def add(a, b):
        return sp.padd(a, b)

    @staticmethod
    def sub(a, b):
        return sp.psub(a, b)

    @staticmethod
    def neg(a):
        return {e: -c for e, c in a.items()}

    def mul(self, a, b):
        if len(a) == 1:
            (e, c), = a.items()
            if e == self._origin:
                return {k: v * c for k, v in b.items()} if c != 1 else b
        if len(b) == 1:
            (e, c), = b.items()
            if e == self._origin:
                return {k: v * c for k, v in a.items()} if c != 1 else a
        return sp.pmul(a, b)

    def exquo(self, a, b):
        if len(b) == 1:
            (e, c), = b.items()
            if e == self._origin:
                out = {}
                for k, v in a.items():
                    q, r = divmod(v, c)
                    if r:
                        raise ArithmeticError("inexact division")
                    out[k] = q
                return out
        q = sp.divexact(a, b)
        if q is None:
            raise ArithmeticError("inexact division")
        return q

    def gcd(self, a, b):
        if not a:
            return b if not b or _lex_lc(b) > 0 else self.neg(b)
        if not b:
            return a if _lex_lc(a) > 0 else self.neg(a)
        if len(a) == 1 and len(b) == 1:
            (ea, ca), = a.items()
            (eb, cb), = b.items()
            return {tuple(map(min, ea, eb)): gcd(ca, cb)}
        return int_poly_gcd(a, b)

    @staticmethod
    def sign(a):
        return -1 if _lex_lc(a) < 0 else 1

    def is_constant(self, a):
        return not a or (len(a) == 1 and self._origin in a)

    def size(self, a):
        return sum(abs(c).bit_length() + 8 * sum(e) for e, c in a.items())

    def to_mpoly(self, a, ring=None):
        if ring is None or ring == self.params:
            return MPoly(self.params if ring is None else ring, dict(a), True)
        return MPoly(self.params, dict(a), True).to_ring(ring)

    def to_ratfunc(self, a):
        return RatFunc(MPoly(self.params, dict(a), True))

    def from_mpoly(self, p: MPoly):
        q = p.to_ring(self.params) if p.ring != self.params else p
        terms, den = sp.clear_denominators(q.terms)
        if den != 1:
            raise ValueError("coefficient must be integral")
        return terms

    def evaluate(self, a, point):
        """Exact value at ``point`` (sequence of rationals in parameter order)."""
        total = Fraction(0)
        for e, c in a.items():
            t = Fraction(c)
            for v, k in zip(point, e):
                if k:
                    t *= Fraction(v) ** k
            total += t
        return total

    def degree(self, a):
        return max((sum(e) for e in a), default=0)

    def variables(self, a):
        used = set()
        for e in a:
            for i, k in enumerate(e):
                if k:
                    used.add(self.params.names[i])
        return used


def _lex_lc(a: dict):
    return a[max(a)]


def make_domain(params: VarRegistry):
    return PolyDomain(params) if len(params) else IntegerDomain(params)
