"""Multivariate gcd over the integers (heuristic GCD with a PRS fallback)."""

from __future__ import annotations

from math import gcd, isqrt

from . import sparse as sp

HEU_GCD_MAX = 6


class HeuristicGCDFailed(Exception):
    pass


def _lc(a: dict):
    return a[max(a)]


def _norm(a: dict) -> int:
    return max(abs(c) for c in a.values())


def _interpolate(h: dict, x: int, idx: int) -> dict:
    half = x // 2
    out = {}
    for e, c in h.items():
        k = 0
        while c:
            d = c % x
            if d > half:
                d -= x
            if d:
                out[e[:idx] + (k,) + e[idx + 1:]] = d
            c = (c - d) // x
            k += 1
    return out


def _primitive(a: dict) -> dict:
    c = sp.int_content(a)
    if c == 1:
        return a
    return {e: v // c for e, v in a.items()}


def _active_var(f: dict, g: dict):
    n = len(next(iter(f)))
    for i in range(n):
        for e in f:
            if e[i]:
                return i
        for e in g:
            if e[i]:
                return i
    return None


def heugcd(f: dict, g: dict):
    """Return ``(h, f/h, g/h)`` for nonzero integer polynomials.

    Raises ``HeuristicGCDFailed`` when no evaluation point works.
    """
    cf = sp.int_content(f)
    cg = sp.int_content(g)
    c = gcd(cf, cg)
    if c != 1:
        f = {e: v // c for e, v in f.items()}
        g = {e: v // c for e, v in g.items()}
    idx = _active_var(f, g)
    if idx is None:
        (ef, a), = f.items()
        (_, b), = g.items()
        h = gcd(a, b)
        return {ef: h * c}, {ef: a // h}, {ef: b // h}
    fn, gn = _norm(f), _norm(g)
    B = 2 * min(fn, gn) + 29
    x = max(min(B, 99 * isqrt(B)), 2 * min(fn // abs(_lc(f)), gn // abs(_lc(g))) + 2)
    for _ in range(HEU_GCD_MAX):
        ff = sp.evaluate_var(f, idx, x)
        gg = sp.evaluate_var(g, idx, x)
        if ff and gg:
            h, cff, cfg = heugcd(ff, gg)
            h = _primitive(_interpolate(h, x, idx))
            q1 = sp.divexact(f, h)
            if q1 is not None:
                q2 = sp.divexact(g, h)
                if q2 is not None:
                    return sp.pscale(h, c), q1, q2
            cff = _interpolate(cff, x, idx)
            h = sp.divexact(f, cff)
            if h is not None:
                q2 = sp.divexact(g, h)
                if q2 is not None:
                    return sp.pscale(h, c), cff, q2
            cfg = _interpolate(cfg, x, idx)
            h = sp.divexact(g, cfg)
            if h is not None:
                q1 = sp.divexact(f, h)
                if q1 is not None:
                    return sp.pscale(h, c), q1, cfg
        x = 73794 * x * isqrt(isqrt(x)) // 27011
    raise HeuristicGCDFailed("no luck")


def _sympy_gcd(f: dict, g: dict) -> dict:
    # fallback only; sympy's recursive PRS is slow but always terminates
    from sympy.polys.rings import ring
    from sympy.polys.domains import ZZ

    n = len(next(iter(f)))
    if n == 0:
        return {(): gcd(f[()], g[()])}
    R, *_ = ring(",".join(f"v{i}" for i in range(n)), ZZ)
    pf = R.from_dict({e: ZZ(c) for e, c in f.items()})
    pg = R.from_dict({e: ZZ(c) for e, c in g.items()})
    h = pf.gcd(pg)
    return {tuple(e): int(c) for e, c in h.items()}


def int_poly_gcd(f: dict, g: dict) -> dict:
    """gcd of integer polynomials, sign-normalized so the lex-leading coefficient is positive."""
    if not f and not g:
        return {}
    if not f:
        h = g
    elif not g:
        h = f
    elif f == g:
        h = f
    else:
        lf, lg = len(f), len(g)
        if lf == 1 and lg == 1:
            (ef, a), = f.items()
            (eg, b), = g.items()
            h = {tuple(map(min, ef, eg)): gcd(a, b)}
        elif lf == 1 or lg == 1:
            # monomial times content against a polynomial
            mono, other = (f, g) if lf == 1 else (g, f)
            (em, a), = mono.items()
            e = em
            for eo in other:
                e = tuple(map(min, e, eo))
            h = {e: gcd(a, sp.int_content(other))}
        else:
            try:
                h = heugcd(f, g)[0]
            except HeuristicGCDFailed:
                h = _sympy_gcd(f, g)
    if _lc(h) < 0:
        h = sp.pneg(h)
    return h


def int_poly_cofactors(f: dict, g: dict):
    """``(h, f/h, g/h)`` with ``h`` the positive-normalized gcd."""
    h = int_poly_gcd(f, g)
    return h, sp.divexact(f, h), sp.divexact(g, h)
