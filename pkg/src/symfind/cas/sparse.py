"""Raw sparse-polynomial kernels on ``{exponent tuple: coefficient}`` dicts.

These functions carry no registry and do no validation; ``MPoly`` and the
Groebner machinery call them on hot paths.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from operator import add, sub

MAX_EXPONENT = 2**31 - 1


def qnorm(c):
    """Canonical scalar: integral Fractions collapse to int."""
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def padd(a: dict, b: dict) -> dict:
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def psub(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        if v is None:
            out[e] = -c
        else:
            v = v - c
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def pneg(a: dict) -> dict:
    return {e: -c for e, c in a.items()}


def pscale(a: dict, s) -> dict:
    if not s:
        return {}
    if s == 1:
        return dict(a)
    return {e: c * s for e, c in a.items()}


def pmul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    bitems = list(b.items())
    for ea, ca in a.items():
        for eb, cb in bitems:
            e = tuple(map(add, ea, eb))
            v = get(e)
            if v is None:
                out[e] = ca * cb
            else:
                v = v + ca * cb
                if v:
                    out[e] = v
                else:
                    del out[e]
    return out


def pmul_term(a: dict, mono: tuple, c) -> dict:
    if not c:
        return {}
    return {tuple(map(add, e, mono)): v * c for e, v in a.items()}


def ppow(a: dict, k: int, nvars: int) -> dict:
    if k < 0:
        raise ValueError("negative exponent")
    result = {(0,) * nvars: 1}
    if k == 0:
        return result
    if len(a) == 1:
        ((e, c),) = a.items()
        if max(e, default=0) * k > MAX_EXPONENT:
            raise OverflowError("exponent overflow: degrees exceed machine-width storage")
        return {tuple(x * k for x in e): c**k}
    base = a
    while True:
        if k & 1:
            result = pmul(result, base)
        k >>= 1
        if not k:
            return result
        base = pmul(base, base)


def max_exponent(a: dict) -> int:
    return max((max(e, default=0) for e in a), default=0)


def int_content(a: dict) -> int:
    g = 0
    for c in a.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def divexact(f: dict, g: dict):
    """Quotient ``q`` with ``f == q*g`` over the coefficient ring, or ``None``.

    Works for int coefficients (exact integer division required) and for
    Fraction coefficients.
    """
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    if not f:
        return {}
    lg = max(g)
    cg = g[lg]
    rational = type(cg) is Fraction
    gitems = [(e, c) for e, c in g.items() if e != lg]
    r = dict(f)
    q = {}
    while r:
        lr = max(r)
        e = tuple(map(sub, lr, lg))
        if min(e, default=0) < 0:
            return None
        c = r.pop(lr)
        if rational or type(c) is Fraction:
            qc = qnorm(Fraction(c) / cg)
        else:
            qc, rem = divmod(c, cg)
            if rem:
                return None
        q[e] = qc
        for eg, cgg in gitems:
            k = tuple(map(add, e, eg))
            v = r.get(k)
            if v is None:
                r[k] = -qc * cgg
            else:
                v = v - qc * cgg
                if v:
                    r[k] = v
                else:
                    del r[k]
    return q


def clear_denominators(a: dict) -> tuple[dict, int]:
    """Return ``(a*L, L)`` with ``L`` the lcm of coefficient denominators."""
    L = 1
    for c in a.values():
        if type(c) is Fraction:
            d = c.denominator
            L = L * d // gcd(L, d)
    if L == 1:
        return {e: qnorm(c) for e, c in a.items()}, 1
    return {e: qnorm(c * L) for e, c in a.items()}, L


def evaluate_var(a: dict, idx: int, value) -> dict:
    """Substitute a scalar for one variable; exponent slot ``idx`` becomes 0."""
    out: dict = {}
    for e, c in a.items():
        k = e[idx]
        if k:
            c = c * value**k
            e = e[:idx] + (0,) + e[idx + 1:]
        v = out.get(e)
        if v is None:
            out[e] = c
        else:
            v = v + c
            if v:
                out[e] = v
            else:
                del out[e]
    return {e: c for e, c in out.items() if c}


def diff(a: dict, idx: int) -> dict:
    out = {}
    for e, c in a.items():
        k = e[idx]
        if k:
            out[e[:idx] + (k - 1,) + e[idx + 1:]] = c * k
    return out
