"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping

from ..errors import RegistryMismatchError, UnknownVariableError
from . import sparse as sp
from .registry import VarRegistry

Rational = Fraction


def as_rational(c):
    """Coerce an int/Fraction-like scalar to the canonical exact scalar."""
    if isinstance(c, bool):
        c = int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return sp.qnorm(c)
    if isinstance(c, _RationalABC):
        return sp.qnorm(Fraction(c.numerator, c.denominator))
    if isinstance(c, str):
        return sp.qnorm(Fraction(c))
    raise TypeError(f"exact rational coefficient required, got {type(c).__name__}")


def grlex_key(e):
    return (sum(e), e)


def _is_scalar(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class MPoly:
    """Polynomial over a ``VarRegistry``; equality is structural.

    ``terms`` maps exponent tuples (registry length) to nonzero int or
    Fraction coefficients. Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: VarRegistry, terms: Mapping | None = None, _trusted: bool = False):
        self.ring = ring
        self._hash = None
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            n = len(ring)
            clean = {}
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise ValueError(f"exponent vector {e} does not match registry length {n}")
                if min(e, default=0) < 0:
                    raise ValueError("negative exponent")
                if max(e, default=0) > sp.MAX_EXPONENT:
                    raise OverflowError("exponent overflow")
                c = as_rational(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
            self.terms = {e: sp.qnorm(c) for e, c in clean.items() if c}

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, ring):
        return cls(ring, {}, True)

    @classmethod
    def const(cls, ring, c):
        c = as_rational(c)
        return cls(ring, {(0,) * len(ring): c} if c else {}, True)

    @classmethod
    def one(cls, ring):
        return cls.const(ring, 1)

    @classmethod
    def var(cls, ring, name):
        i = ring.index(name)
        e = [0] * len(ring)
        e[i] = 1
        return cls(ring, {tuple(e): 1}, True)

    @classmethod
    def monomial(cls, ring, exps: Mapping[str, int], c=1):
        e = [0] * len(ring)
        for n, k in exps.items():
            e[ring.index(n)] = k
        return cls(ring, {tuple(e): c})

    def _new(self, terms):
        return MPoly(self.ring, terms, True)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RegistryMismatchError("polynomials live in different registries")
            return other
        if _is_scalar(other):
            return MPoly.const(self.ring, other)
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(sp.padd(self.terms, o.terms))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(sp.psub(self.terms, o.terms))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._new(sp.psub(o.terms, self.terms))

    def __neg__(self):
        return self._new(sp.pneg(self.terms))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if _is_scalar(other):
            return self._new({e: sp.qnorm(c * other) for e, c in self.terms.items()} if other else {})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if sp.max_exponent(self.terms) + sp.max_exponent(o.terms) > sp.MAX_EXPONENT:
            raise OverflowError("exponent overflow: degrees exceed machine-width storage")
        return self._new(_normalize_coeffs(sp.pmul(self.terms, o.terms)))

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        if sp.max_exponent(self.terms) * k > sp.MAX_EXPONENT:
            raise OverflowError("exponent overflow: degrees exceed machine-width storage")
        return self._new(_normalize_coeffs(sp.ppow(self.terms, k, len(self.ring))))

    def scale(self, c):
        return self * as_rational(c)

    def divexact(self, other: "MPoly") -> "MPoly":
        """Exact quotient; raises ``ValueError`` if ``other`` does not divide ``self``."""
        o = self._coerce(other)
        q = sp.divexact(self.terms, o.terms)
        if q is None:
            raise ValueError("inexact polynomial division")
        return self._new(_normalize_coeffs(q))

    def divides(self, other: "MPoly") -> bool:
        o = self._coerce(other)
        return sp.divexact(o.terms, self.terms) is not None

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MPoly):
            return (other.ring is self.ring or other.ring == self.ring) and self.terms == other.terms
        if _is_scalar(other):
            if not other:
                return not self.terms
            return self.terms == {(0,) * len(self.ring): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # inspection -----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), 0)

    def constant_term(self):
        return self.terms.get((0,) * len(self.ring), 0)

    def __len__(self):
        return len(self.terms)

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.ring.index(var)
        return max(e[i] for e in self.terms)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self.ring.index(n) for n in names]
        if not self.terms:
            return -1
        return max(sum(e[i] for i in idx) for e in self.terms)

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ring.names[i])
        return used

    def leading_term(self, key=grlex_key):
        """``(exponent, coefficient)`` of the maximal term under ``key``."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def leading_coefficient(self, key=grlex_key):
        return self.leading_term(key)[1]

    def sorted_terms(self, key=grlex_key):
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    # calculus and substitution -------------------------------------------
    def diff(self, var: str) -> "MPoly":
        return self._new(sp.diff(self.terms, self.ring.index(var)))

    def partial_eval(self, values: Mapping[str, object]) -> "MPoly":
        """Substitute exact scalars for some variables (registry kept)."""
        out = self.terms
        for n, v in values.items():
            out = sp.evaluate_var(out, self.ring.index(n), as_rational(v))
        return self._new(_normalize_coeffs(out))

    def eval(self, values: Mapping[str, object]):
        """Evaluate at a full assignment. Values may be any numeric type."""
        names = self.ring.names
        vals = []
        for n in names:
            vals.append(values.get(n))
        total = 0
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    v = vals[i]
                    if v is None:
                        raise UnknownVariableError(f"no value for {names[i]!r}")
                    t = t * v**k
            total = total + t
        return total

    def substitute(self, bindings: Mapping[str, "MPoly"], target: VarRegistry | None = None) -> "MPoly":
        """Polynomial composition.

        Bound variables are replaced by polynomials over ``target``; unbound
        variables are carried over to ``target`` by name.
        """
        target = target or self.ring
        n = len(self.ring)
        images = []
        for i, name in enumerate(self.ring.names):
            if name in bindings:
                b = bindings[name]
                if isinstance(b, MPoly):
                    if b.ring is not target and b.ring != target:
                        raise RegistryMismatchError(f"binding for {name!r} is not over the target registry")
                    images.append(b.terms)
                else:
                    c = as_rational(b)
                    images.append({(0,) * len(target): c} if c else {})
            else:
                images.append(None)
        # variables passed through by name
        passthru = {}
        for i, name in enumerate(self.ring.names):
            if images[i] is None:
                used = any(e[i] for e in self.terms)
                if used:
                    passthru[i] = target.index(name)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            r = cache.get(key)
            if r is None:
                if k == 1:
                    r = images[i]
                else:
                    half = power(i, k // 2)
                    r = sp.pmul(half, half)
                    if k % 2:
                        r = sp.pmul(r, images[i])
                cache[key] = r
            return r

        m = len(target)
        out: dict = {}
        for e, c in self.terms.items():
            base = [0] * m
            factors = []
            for i in range(n):
                k = e[i]
                if not k:
                    continue
                if images[i] is None:
                    base[passthru[i]] += k
                else:
                    factors.append(power(i, k))
            term = {tuple(base): c}
            for f in factors:
                term = sp.pmul(term, f)
                if not term:
                    break
            out = sp.padd(out, term)
        return MPoly(target, _normalize_coeffs(out), True)

    def to_ring(self, target: VarRegistry) -> "MPoly":
        """Re-embed into another registry by variable names."""
        if target is self.ring or target == self.ring:
            return self
        pos = []
        for i, name in enumerate(self.ring.names):
            pos.append(target.index(name) if name in target else None)
        m = len(target)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * m
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise UnknownVariableError(f"variable {self.ring.names[i]!r} not in target registry")
                    ne[j] = k
            out[tuple(ne)] = c
        return MPoly(target, out, True)

    def coefficients(self, names: Iterable[str], rest: VarRegistry | None = None) -> dict:
        """Collect w.r.t. the variables ``names``.

        Returns ``{exponent tuple over names: MPoly}`` where each coefficient
        lives in ``rest`` (default: the same registry, with those slots zero).
        """
        names = list(names)
        idx = [self.ring.index(n) for n in names]
        idxset = set(idx)
        keep = [i for i in range(len(self.ring)) if i not in idxset]
        groups: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            if rest is None:
                ce = tuple(0 if i in idxset else e[i] for i in range(len(e)))
            else:
                ce = tuple(e[i] for i in keep)
            groups.setdefault(key, {})[ce] = c
        ring = rest or self.ring
        if rest is not None and len(rest) != len(keep):
            raise RegistryMismatchError("coefficient registry must hold exactly the remaining variables")
        return {k: MPoly(ring, v, True) for k, v in groups.items()}

    # content --------------------------------------------------------------
    def content(self):
        """Positive rational content (gcd of numerators / lcm of denominators)."""
        if not self.terms:
            return 0
        num = 0
        den = 1
        for c in self.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return sp.qnorm(Fraction(num, den))

    def primitive(self) -> "MPoly":
        """Integer-coefficient primitive part with positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self._new({e: sp.qnorm(v / c) if type(v) is Fraction or type(c) is Fraction else v // c
                          for e, v in self.terms.items()})

    def monic(self, key=grlex_key) -> "MPoly":
        if not self.terms:
            return self
        lc = Fraction(self.leading_coefficient(key))
        return self._new({e: sp.qnorm(v / lc) for e, v in self.terms.items()})

    # printing -------------------------------------------------------------
    def __str__(self):
        return format_poly(self.terms, self.ring.names)

    def __repr__(self):
        return f"MPoly({self})"


def _normalize_coeffs(terms: dict) -> dict:
    for c in terms.values():
        if type(c) is Fraction:
            return {e: sp.qnorm(v) for e, v in terms.items()}
    return terms


def format_monomial(e, names) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(names[i])
        elif k:
            parts.append(f"{names[i]}^{k}")
    return "*".join(parts)


def format_poly(terms: Mapping, names, key=grlex_key) -> str:
    if not terms:
        return "0"
    out = []
    for e, c in sorted(terms.items(), key=lambda t: key(t[0]), reverse=True):
        mono = format_monomial(e, names)
        neg = c < 0
        a = -c if neg else c
        if mono:
            s = mono if a == 1 else f"{a}*{mono}"
        else:
            s = str(a)
        if not out:
            out.append(f"-{s}" if neg else s)
        else:
            out.append(f" - {s}" if neg else f" + {s}")
    return "".join(out)
