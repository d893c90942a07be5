"""Exact nullspace of homogeneous linear systems over Q(theta).

A rank check at a random rational parameter point comes first: full rank
there proves full generic rank. Otherwise a sparse fraction-free
Gauss-Jordan elimination over Z[theta] gives the nullspace, and each
basis vector is verified against every row.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from ..cas import MPoly, VarRegistry
from ..errors import SolverBugError
from .domain import make_domain


@dataclass
class Nullspace:
    columns: tuple
    params: VarRegistry
    dimension: int
    vectors: list  # dict column name -> MPoly over params (primitive)
    method: str

    def to_json(self):
        return {
            "dimension": self.dimension,
            "method": self.method,
            "vectors": [{c: str(v) for c, v in vec.items()} for vec in self.vectors],
        }


def _specialized_rank(rows, ncols, params, seed):
    rng = random.Random(seed)
    point = {p: Fraction(rng.randint(1, 10**6), rng.randint(1, 997)) for p in params.names}
    pivots = {}
    rank = 0
    for row in rows:
        r = {}
        for j, c in row.items():
            v = Fraction(c.eval(point)) if isinstance(c, MPoly) else Fraction(c)
            if v:
                r[j] = v
        for col in sorted(pivots):
            if col in r:
                f = r[col]
                for k, v in pivots[col].items():
                    nv = r.get(k, 0) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        if r:
            col = min(r)
            inv = 1 / r[col]
            r = {k: v * inv for k, v in r.items()}
            for c2, prow in pivots.items():
                if col in prow:
                    f = prow[col]
                    for k, v in r.items():
                        nv = prow.get(k, 0) - f * v
                        if nv:
                            prow[k] = nv
                        else:
                            prow.pop(k, None)
            pivots[col] = r
            rank += 1
            if rank == ncols:
                break
    return rank


def nullspace(lin, seed: int = 0) -> Nullspace:
    """Basis of the solution space of ``lin`` (a LinearCoefficientSystem)."""
    params = lin.params_ring
    cols = tuple(lin.columns)
    n = len(cols)
    rows = list(lin.rows)
    if not rows:
        vecs = [{cols[j]: MPoly.one(params)} for j in range(n)]
        return Nullspace(cols, params, n, vecs, "empty system")
    if _specialized_rank(rows, n, params, seed) == n:
        return Nullspace(cols, params, 0, [], "full rank at a rational point")
    D = make_domain(params)
    drows = [_integral_row(D, r) for r in rows]
    drows = [_row_primitive(D, {j: c for j, c in r.items() if not D.is_zero(c)}) for r in drows]
    pivots = []  # list of (col, row)
    for r in drows:
        for col, prow in pivots:
            if col in r:
                r = _eliminate(D, r, prow, col)
        if not r:
            continue
        col = min(r, key=lambda j: (D.size(r[j]), j))
        pivots.append((col, r))
    # back substitution to reduced echelon form
    for k in range(len(pivots) - 1, -1, -1):
        col_k, row_k = pivots[k]
        for j in range(k + 1, len(pivots)):
            col_j, row_j = pivots[j]
            if col_j in row_k:
                row_k = _eliminate(D, row_k, row_j, col_j)
        pivots[k] = (col_k, row_k)
    pivot_cols = {c for c, _ in pivots}
    free = [j for j in range(n) if j not in pivot_cols]
    vectors = []
    for f in free:
        L = D.one
        for c, r in pivots:
            if f in r:
                a = r[c]
                L = D.exquo(D.mul(L, a), D.gcd(L, a))
        vec = {f: L}
        for c, r in pivots:
            if f in r:
                vec[c] = D.neg(D.mul(r[f], D.exquo(L, r[c])))
        vec = _row_primitive(D, vec)
        vectors.append(vec)
    for vec in vectors:
        for row in drows:
            acc = D.zero
            for j, c in row.items():
                if j in vec:
                    acc = D.add(acc, D.mul(c, vec[j]))
            if not D.is_zero(acc):
                raise SolverBugError("nullspace vector fails verification")
    out = [{cols[j]: D.to_mpoly(v) for j, v in sorted(vec.items())} for vec in vectors]
    return Nullspace(cols, params, len(out), out, "fraction-free elimination")


def _integral_row(D, row):
    from math import lcm

    L = 1
    for c in row.values():
        for v in c.terms.values():
            L = lcm(L, Fraction(v).denominator)
    return {j: D.from_mpoly(c * L) for j, c in row.items()}


def _eliminate(D, r, prow, col):
    a = prow[col]
    b = r[col]
    g = D.gcd(a, b)
    a1, b1 = D.exquo(a, g), D.exquo(b, g)
    out = {}
    for j, v in r.items():
        out[j] = D.mul(v, a1)
    for j, v in prow.items():
        nv = D.sub(out.get(j, D.zero), D.mul(v, b1))
        if D.is_zero(nv):
            out.pop(j, None)
        else:
            out[j] = nv
    out.pop(col, None)
    return _row_primitive(D, out)


def _row_primitive(D, r):
    if not r:
        return r
    g = D.zero
    for v in r.values():
        g = D.gcd(g, v)
        if D.is_unit(g):
            g = D.one
            break
    if not D.is_one(g):
        r = {j: D.exquo(v, g) for j, v in r.items()}
    first = r[min(r)]
    if D.sign(first) < 0:
        r = {j: D.neg(v) for j, v in r.items()}
    return r
