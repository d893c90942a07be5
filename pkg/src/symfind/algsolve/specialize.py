"""Random rational specialization of the parameters (probabilistic fast path)."""

from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

from ..cas import VarRegistry
from ..errors import SymfindError

MAX_TRIES = 50


def _default_sampler(rng: random.Random, name: str):
    return Fraction(rng.randint(1, 2000), rng.randint(1, 97))


def specialize_random(asys, seed: int, sampler=None, avoid=()):
    """Copy of ``asys`` with every parameter replaced by a seeded random
    rational. Points where a recorded denominator (or an extra polynomial in
    ``avoid``) vanishes identically, or where a nondegeneracy constraint
    collapses to zero, are rejected and resampled."""
    if asys.specialization is not None:
        raise SymfindError("system is already specialized")
    rng = random.Random(seed)
    sampler = sampler or _default_sampler
    names = list(asys.params)
    for _ in range(MAX_TRIES):
        point = {p: Fraction(sampler(rng, p)) for p in names}
        if _bad_point(asys, point, avoid):
            continue
        return _apply(asys, point)
    raise SymfindError(f"no admissible specialization found in {MAX_TRIES} tries")


def _bad_point(asys, point, avoid):
    for d in list(asys.denominators) + list(avoid):
        vals = {k: v for k, v in point.items() if k in d.ring}
        if d.partial_eval(vals).is_zero():
            return True
    for g in asys.nondegeneracy:
        if g.partial_eval(point).is_zero():
            return True
    return False


def _apply(asys, point):
    unknowns = tuple(asys.unknowns)
    ring = VarRegistry(list(unknowns), [asys.ring.kind(u) for u in unknowns])

    def spec(p):
        q = p.partial_eval(point).to_ring(ring)
        return q.primitive() if not q.is_zero() else q

    eqs = [q for q in (spec(e) for e in asys.equations) if not q.is_zero()]
    nondeg = [spec(g) for g in asys.nondegeneracy]
    return replace(asys, ring=ring, params=(), equations=eqs, nondegeneracy=nondeg,
                   specialization=dict(point), notes=list(asys.notes) + ["parameters specialized"])
