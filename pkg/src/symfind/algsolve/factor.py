"""Univariate factorization over Q(theta), delegated to sympy.

A polynomial in T with Q(theta) coefficients is made integral in Z[theta][T];
by Gauss's lemma its irreducible factors of positive T-degree over Z[theta]
are exactly its irreducible factors over Q(theta).
"""

from __future__ import annotations

from ..cas import MPoly, RatFunc, VarRegistry
from ..cas import sparse as sp
from ..cas.ratfunc import multivariate_gcd


def clear_coefficients(coeffs: list[RatFunc], params: VarRegistry) -> list[MPoly]:
    """Multiply by the lcm of denominators and divide by the content."""
    dens = [c.den for c in coeffs if c]
    L = MPoly.one(params)
    for d in dens:
        g = multivariate_gcd(L, d)
        L = (L * d).divexact(g)
    polys = [(c.num * L.divexact(c.den)) if c else MPoly.zero(params) for c in coeffs]
    g = None
    for p in polys:
        if p:
            g = p if g is None else multivariate_gcd(g, p)
    if g is not None and not g.is_constant():
        polys = [p.divexact(g) if p else p for p in polys]
    lead = next(p for p in reversed(polys) if p)
    scale = _content(polys)
    if lead.leading_coefficient() < 0:
        scale = -scale
    return [p.scale(sp.qnorm(1 / _frac(scale))) if p else p for p in polys]


def _frac(x):
    from fractions import Fraction
    return Fraction(x)


def _content(polys):
    from fractions import Fraction
    from math import gcd, lcm

    num, den = 0, 1
    for p in polys:
        for c in p.terms.values():
            c = Fraction(c)
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
    return Fraction(num, den)


def factor_univariate(coeffs: list[RatFunc], params: VarRegistry):
    """Irreducible factors ``[(coefficient list low->high of MPoly, multiplicity)]``.

    Factors are primitive over Z[theta] with positive leading coefficient
    and sorted by (degree, printed form).
    """
    import sympy

    polys = clear_coefficients(coeffs, params)
    deg = len(polys) - 1
    while deg > 0 and not polys[deg]:
        deg -= 1
    if deg <= 0:
        return []
    if deg == 1:
        return [(polys[:2], 1)]
    k = len(params)
    T = sympy.Symbol("T_")
    gens = [T] + [sympy.Symbol(f"p_{i}") for i in range(k)]
    data = {}
    for d, p in enumerate(polys):
        for e, c in p.terms.items():
            data[(d, *e)] = int(c)
    P = sympy.Poly.from_dict(data, *gens, domain="ZZ")
    _, factors = P.factor_list()
    out = []
    for f, mult in factors:
        fd = f.as_dict()
        tdeg = max(e[0] for e in fd)
        if tdeg == 0:
            continue
        cl = [dict() for _ in range(tdeg + 1)]
        for e, c in fd.items():
            cl[e[0]][tuple(e[1:])] = int(c)
        flist = [MPoly(params, t, True) if t else MPoly.zero(params) for t in cl]
        if flist[-1].leading_coefficient() < 0:
            flist = [-p for p in flist]
        out.append((flist, int(mult)))
    out.sort(key=lambda fm: (len(fm[0]), [str(p) for p in fm[0]]))
    return out


def squarefree_part(coeffs: list[RatFunc], params: VarRegistry):
    facs = factor_univariate(coeffs, params)
    out = [RatFunc.const(params, 1)]
    for f, _ in facs:
        out = poly_mul_rf(out, [RatFunc(p) for p in f], params)
    return out


def poly_mul_rf(a, b, params):
    zero = RatFunc.const(params, 0)
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return out


def format_univariate(coeffs: list[MPoly], var: str, params: VarRegistry) -> MPoly:
    """``sum coeffs[k] * var^k`` as an MPoly over (params, var)."""
    reg = VarRegistry([*params.names, var], ["parameter"] * len(params) + ["transformed-parameter"])
    total = MPoly.zero(reg)
    for d, c in enumerate(coeffs):
        if c:
            total = total + c.to_ring(reg) * MPoly.var(reg, var) ** d
    return total
