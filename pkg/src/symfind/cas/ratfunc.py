"""Reduced rational functions and the public gcd / substitution operations."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Mapping

from ..errors import RegistryMismatchError, ZeroDenominatorError
from . import sparse as sp
from .gcd import int_poly_gcd
from .mpoly import MPoly, _is_scalar, as_rational, format_poly, grlex_key
from .registry import VarRegistry


def _int_parts(p: MPoly) -> tuple[dict, int]:
    return sp.clear_denominators(p.terms)


def multivariate_gcd(a: MPoly, b: MPoly) -> MPoly:
    """Monic gcd over Q; ``gcd(p, 0)`` is ``p`` made monic, ``gcd(0, 0) = 0``."""
    if a.ring is not b.ring and a.ring != b.ring:
        raise RegistryMismatchError("gcd of polynomials over different registries")
    fa, _ = _int_parts(a)
    fb, _ = _int_parts(b)
    h = int_poly_gcd(fa, fb)
    return MPoly(a.ring, h, True).monic()


class RatFunc:
    """``num/den`` with integer-coefficient, jointly primitive, coprime parts.

    The denominator's leading coefficient (graded-lex in registry order) is
    positive, which makes the representation unique.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _normalized: bool = False):
        if den is None:
            if isinstance(num, RatFunc):
                self.num, self.den, self._hash = num.num, num.den, num._hash
                return
            den = MPoly.one(num.ring)
        elif _is_scalar(den):
            den = MPoly.const(num.ring, den)
        if num.ring is not den.ring and num.ring != den.ring:
            raise RegistryMismatchError("numerator and denominator registries differ")
        self._hash = None
        if _normalized:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den)

    @property
    def ring(self) -> VarRegistry:
        return self.num.ring

    @classmethod
    def const(cls, ring, c):
        c = Fraction(as_rational(c))
        return cls(MPoly.const(ring, c.numerator), MPoly.const(ring, c.denominator), True)

    @classmethod
    def var(cls, ring, name):
        return cls(MPoly.var(ring, name), MPoly.one(ring), True)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RegistryMismatchError("rational functions over different registries")
            return other
        if isinstance(other, MPoly):
            return RatFunc(other)
        if _is_scalar(other):
            return RatFunc.const(self.ring, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDenominatorError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            raise ValueError("integer powers only")
        if k < 0:
            if self.num.is_zero():
                raise ZeroDenominatorError("zero to a negative power")
            return RatFunc(self.den**(-k), self.num**(-k))
        return RatFunc(self.num**k, self.den**k, True)

    def inverse(self):
        return RatFunc.const(self.ring, 1) / self

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, MPoly) or _is_scalar(other):
            o = self._coerce(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        return sp.qnorm(Fraction(self.num.constant_value()) / Fraction(self.den.constant_value()))

    def as_poly(self) -> MPoly:
        if not self.den.is_constant():
            raise ValueError("not a polynomial")
        return self.num * Fraction(1, self.den.constant_value())

    def variables(self):
        return self.num.variables() | self.den.variables()

    def diff(self, var: str) -> "RatFunc":
        n, d = self.num, self.den
        return RatFunc(n.diff(var) * d - n * d.diff(var), d * d)

    def substitute(self, bindings: Mapping[str, "RatFunc"], target: VarRegistry | None = None) -> "RatFunc":
        return substitute(self, bindings, target)

    def eval(self, values):
        d = self.den.eval(values)
        if d == 0:
            raise ZeroDenominatorError("denominator vanishes at the evaluation point")
        n = self.num.eval(values)
        if isinstance(n, (int, Fraction)) and isinstance(d, (int, Fraction)):
            return sp.qnorm(Fraction(n) / d)  # stay exact on rational points
        return n / d

    def to_ring(self, target):
        return RatFunc(self.num.to_ring(target), self.den.to_ring(target), True)

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({self})"


def _normalize(num: MPoly, den: MPoly) -> tuple[MPoly, MPoly]:
    if den.is_zero():
        raise ZeroDenominatorError("zero denominator")
    ring = num.ring
    if num.is_zero():
        return num, MPoly.one(ring)
    n, ln = sp.clear_denominators(num.terms)
    d, ld = sp.clear_denominators(den.terms)
    # n/ln over d/ld  ->  (n*ld) / (d*ln)
    if ld != 1:
        n = {e: c * ld for e, c in n.items()}
    if ln != 1:
        d = {e: c * ln for e, c in d.items()}
    if len(d) > 1 or any(next(iter(d))):
        g = int_poly_gcd(n, d)
        if len(g) > 1 or any(next(iter(g))):
            n = sp.divexact(n, g)
            d = sp.divexact(d, g)
    c = gcd(sp.int_content(n), sp.int_content(d))
    lead = max(d, key=grlex_key)
    if d[lead] < 0:
        c = -c
    if c != 1:
        n = {e: v // c for e, v in n.items()}
        d = {e: v // c for e, v in d.items()}
    return MPoly(ring, n, True), MPoly(ring, d, True)


def ratfunc_normalize(num: MPoly, den: MPoly) -> RatFunc:
    return RatFunc(num, den)


def _poly_sub_rational(p: MPoly, images: list, target: VarRegistry) -> tuple[dict, dict]:
    """Compose ``p`` with rational images; returns (numerator, denominator) dicts."""
    n = len(p.ring)
    degs = [0] * n
    for e in p.terms:
        for i, k in enumerate(e):
            if k > degs[i]:
                degs[i] = k
    m = len(target)
    one = {(0,) * m: 1}
    pw_cache: dict = {}

    def pw(d: dict, k: int, tag):
        key = (tag, k)
        r = pw_cache.get(key)
        if r is None:
            r = sp.ppow(d, k, m) if k != 1 else d
            pw_cache[key] = r
        return r

    den = one
    for i in range(n):
        if degs[i] and images[i] is not None:
            den = sp.pmul(den, pw(images[i][1], degs[i], ("d", i)))
    out: dict = {}
    for e, c in p.terms.items():
        term = {(0,) * m: c}
        for i, k in enumerate(e):
            img = images[i]
            if img is None:
                continue
            inum, iden = img
            if k:
                term = sp.pmul(term, pw(inum, k, ("n", i)))
            if degs[i] - k:
                term = sp.pmul(term, pw(iden, degs[i] - k, ("d", i)))
        out = sp.padd(out, term)
    return out, den


def substitute(expr, bindings: Mapping[str, object], target: VarRegistry | None = None) -> RatFunc:
    """Exact composition ``expr(bindings)``, normalized.

    Bindings map variable names to ``RatFunc``/``MPoly``/scalars over
    ``target`` (default: ``expr``'s registry). Unbound variables pass
    through by name.
    """
    if isinstance(expr, MPoly):
        expr = RatFunc(expr)
    target = target or expr.ring
    src = expr.ring
    images = []
    for name in src.names:
        if name in bindings:
            b = bindings[name]
            if isinstance(b, MPoly):
                b = RatFunc(b)
            elif not isinstance(b, RatFunc):
                b = RatFunc.const(target, b)
            if b.ring is not target and b.ring != target:
                raise RegistryMismatchError(f"binding for {name!r} is not over the target registry")
            if b.den.is_zero():
                raise ZeroDenominatorError(f"binding for {name!r} has zero denominator")
            images.append((b.num.terms, b.den.terms))
        elif name in target:
            images.append((MPoly.var(target, name).terms, MPoly.one(target).terms))
        else:
            images.append(None)
    for i, name in enumerate(src.names):
        if images[i] is None and any(e[i] for e in list(expr.num.terms) + list(expr.den.terms)):
            raise RegistryMismatchError(f"variable {name!r} has no image in the target registry")
    nn, nd = _poly_sub_rational(expr.num, images, target)
    dn, dd = _poly_sub_rational(expr.den, images, target)
    num = MPoly(target, sp.pmul(nn, dd), True)
    den = MPoly(target, sp.pmul(dn, nd), True)
    if den.is_zero():
        raise ZeroDenominatorError("substitution makes the denominator identically zero")
    return RatFunc(num, den)


def format_ratfunc(f: RatFunc) -> str:
    num = format_poly(f.num.terms, f.ring.names)
    if f.den == 1:
        return num
    den = format_poly(f.den.terms, f.ring.names)
    if len(f.num) > 1:
        num = f"({num})"
    if len(f.den) > 1 or not f.den.is_constant() and _has_product(f.den):
        den = f"({den})"
    return f"{num}/{den}"


def _has_product(p: MPoly) -> bool:
    (e, c), = p.terms.items()
    return c != 1 or sum(1 for k in e if k) > 1 or any(k > 1 for k in e)
