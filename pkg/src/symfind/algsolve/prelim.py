"""Linear pre-elimination of unknowns with parameter-only coefficients.

An equation ``a(theta)*u + r = 0`` with ``u`` absent from ``r`` fixes
``u = -r/a`` over Q(theta); substituting it everywhere (after multiplying by
powers of ``a``) gives the same ideal with one unknown fewer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .poly import SolverRing


@dataclass
class Elimination:
    unknown: str
    num: dict  # polynomial in the remaining unknowns (ring of the whole system)
    den: object  # Z[theta] coefficient


def _linear_candidates(ring: SolverRing, p, allowed):
    """Indices ``i`` for which ``p = a*u_i + r`` with ``a`` parameter-only."""
    out = []
    for i in allowed:
        a = None
        ok = True
        for e, c in p.items():
            k = e[i]
            if k == 0:
                continue
            if k > 1 or sum(e) != 1:
                ok = False
                break
            a = c
        if ok and a is not None:
            out.append((i, a))
    return out


def pre_eliminate(ring: SolverRing, polys, extra=(), priority=None, limits=None):
    """Repeatedly solve linear equations; returns (remaining polys, extra
    polys after substitution, eliminations in order)."""
    polys = [p for p in polys if p]
    extra = list(extra)
    priority = priority or (lambda i: 0)
    elims: list[Elimination] = []
    alive = set(range(ring.n))
    while True:
        best = None
        for j, p in enumerate(polys):
            for i, a in _linear_candidates(ring, p, alive):
                score = (priority(i), ring.domain.size(a), len(p), j, i)
                if best is None or score < best[0]:
                    best = (score, j, i, a)
        if best is None:
            break
        _, j, i, a = best
        p = polys.pop(j)
        name = ring.unknowns[i]
        num = ring.neg({e: c for e, c in p.items() if e[i] == 0})
        elims.append(Elimination(name, num, a))
        alive.discard(i)
        new = []
        for q in polys:
            q2 = ring.primitive(ring.substitute_linear(q, i, num, a))
            if q2:
                new.append(q2)
        polys = _unique(new)
        extra = [ring.primitive(ring.substitute_linear(q, i, num, a)) for q in extra]
        if limits is not None:
            limits.tick("linear elimination")
        if any(len(q) == 1 and next(iter(q)) == ring.zero_exp for q in polys):
            break
    return polys, extra, elims


def _unique(polys):
    seen, out = set(), []
    for p in polys:
        k = frozenset((e, frozenset(c.items()) if isinstance(c, dict) else c) for e, c in p.items())
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out

