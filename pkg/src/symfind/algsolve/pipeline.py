"""End-to-end solve of an AlgebraicSystem: split, saturate, count, decompose."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..cas import RatFunc, VarRegistry
from .decompose import Decomposer
from .factor import factor_univariate
from .groebner import Limits, groebner
from .order import TermOrder
from .poly import SolverRing
from .quotient import dimension_and_count
from .split import Component, Splitter


@dataclass
class UnknownValues:
    """Values an unknown takes on a (possibly positive-dimensional) solution set.

    ``finite`` False means infinitely many; otherwise ``factors`` lists the
    irreducible univariate factors (MPoly coefficients, low -> high) whose
    roots are exactly the values.
    """

    unknown: str
    finite: bool
    factors: list = field(default_factory=list)

    def rational_values(self):
        out = []
        for f in self.factors:
            if len(f) == 2:
                out.append(RatFunc(-f[0], f[1]))
        return out

    def count(self):
        return sum(len(f) - 1 for f in self.factors) if self.finite else None

    def to_json(self):
        if not self.finite:
            return {"finite": False}
        return {"finite": True, "values": [str(v) for v in self.rational_values()],
                "algebraic_factors": len([f for f in self.factors if len(f) > 2])}


@dataclass
class SolveResult:
    unknowns: tuple
    params: VarRegistry
    zero_dimensional: bool
    count: int | None
    branches: list
    components: list
    quotient_dimensions: list
    unknown_values: dict
    ring: SolverRing
    steps: int = 0
    seconds: float = 0.0
    nodes: int = 0
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "zero_dimensional": self.zero_dimensional,
            "count": self.count,
            "components": len(self.components),
            "quotient_dimensions": list(self.quotient_dimensions),
            "branches": [b.to_json() for b in self.branches],
            "unknown_values": {u: v.to_json() for u, v in self.unknown_values.items()},
            "steps": self.steps,
            "case_splits": self.nodes,
            "notes": list(self.notes),
        }

    def groebner_json(self):
        return [
            {"case": list(c.path), "zero_dimensional": c.zero_dimensional,
             "eliminated": {el.unknown: f"({c.basis.ring.to_str(el.num)})/({c.basis.ring.domain.to_mpoly(el.den)})"
                            for el in c.elims},
             "basis": c.basis.to_json()}
            for c in self.components
        ]


def _priority(ring: SolverRing):
    # eliminate ansatz coefficients before transformed parameters so that
    # the latter survive as the natural coordinates of the solution set
    tildes = {i for i, u in enumerate(ring.unknowns) if u.endswith("_tilde")}
    return lambda i: 1 if i in tildes else 0


def solve(asys, limits: Limits | None = None, seed: int = 0, eliminate_values=True) -> SolveResult:
    """Solve ``asys`` (ansatz AlgebraicSystem) over Q(theta)."""
    limits = limits or Limits()
    t0 = time.monotonic()
    params = VarRegistry(asys.params, "parameter")
    ring = SolverRing(asys.unknowns, params)
    eqs = [ring.from_mpoly(e) for e in asys.equations]
    nondeg = [ring.from_mpoly(g) for g in asys.nondegeneracy]
    splitter = Splitter(ring, _priority(ring), limits)
    comps = splitter.run(eqs, nondeg)
    E = splitter.ext
    reported = tuple(asys.unknowns)
    tilde_idx = [E.index(u) for u in asys.unknowns if u.endswith("_tilde")]
    coeff_idx = [E.index(u) for u in asys.unknowns if not u.endswith("_tilde")]
    dec = Decomposer(E, reported, tilde_idx + coeff_idx, None, limits, seed)
    zero_dim = all(c.zero_dimensional for c in comps)
    branches, qdims = [], []
    for c in comps:
        if not c.zero_dimensional:
            qdims.append(None)
            continue
        eliminated = {el.unknown for el in c.elims}
        active = [i for i in range(E.n) if E.unknowns[i] not in eliminated]
        qdims.append(dimension_and_count(c.basis, active)["count"])
        branches.extend(dec.decompose(c.basis, c.elims, c.path))
    count = sum(b.degree for b in branches) if zero_dim else None
    values = {}
    if zero_dim:
        values = _values_from_branches(branches, reported, params)
    elif eliminate_values:
        values = _values_by_elimination(E, comps, reported, params, limits)
    notes = []
    if zero_dim and sum(qdims) != count:
        notes.append(f"quotient dimension with multiplicity {sum(qdims)} differs from the number of "
                     f"distinct solutions {count}")
    return SolveResult(reported, params, zero_dim, count, branches, comps, qdims, values, E,
                       limits.used_steps, time.monotonic() - t0, splitter.nodes_seen, notes)


def _values_from_branches(branches, reported, params):
    out = {}
    for u in reported:
        facs, seen = [], set()
        for b in branches:
            if b.rational:
                v = b.value(u)
                f = [-v.num, v.den]
            else:
                cs = b.values[u]
                if len(cs) == 1 or all(not c for c in cs[1:]):
                    v = cs[0]
                    f = [-v.num, v.den]
                else:
                    f = None  # algebraic value; recorded by its branch
            if f is None:
                key = ("alg", id(b))
                facs.append(["alg", b])
                continue
            key = (str(f[0]), str(f[1]))
            if key not in seen:
                seen.add(key)
                facs.append(f)
        out[u] = UnknownValues(u, True, [f for f in facs if not (isinstance(f, list) and f and f[0] == "alg")])
        out[u].algebraic_branches = [f[1] for f in facs if isinstance(f, list) and f and f[0] == "alg"]
    return out


def _values_by_elimination(E: SolverRing, comps, reported, params, limits):
    out = {}
    for u in reported:
        finite, facs, seen = True, [], set()
        for c in comps:
            r = eliminant(E, c, u, limits)
            if r is None:
                finite = False
                break
            for f in r:
                key = tuple(str(x) for x in f)
                if key not in seen:
                    seen.add(key)
                    facs.append(f)
        out[u] = UnknownValues(u, finite, facs if finite else [])
    return out


def eliminant(E: SolverRing, comp: Component, u: str, limits=None):
    """Irreducible factors of the generator of I ∩ Q(theta)[u], or None if zero."""
    D = E.domain
    num, den = E.var(u), D.one
    for el in comp.elims:
        i = E.index(el.unknown)
        d = max((e[i] for e in num), default=0)
        if d:
            num = E.substitute_linear(num, i, el.num, el.den)
            for _ in range(d):
                den = D.mul(den, el.den)
    F = E.extend(["z_elim"])
    zi = F.index("z_elim")
    zpoly = F.sub(F.var("z_elim", den), E.pad(num, F))
    eliminated = {el.unknown for el in comp.elims}
    others = [i for i in range(E.n) if E.unknowns[i] not in eliminated]
    order = TermOrder.block([others, [zi]])
    gb = groebner(F, [E.pad(p, F) for p in comp.basis.polys] + [zpoly], order, limits)
    if gb.is_unit():
        return []
    uni = [p for p in gb.polys if all(all(k == 0 for j, k in enumerate(e) if j != zi) for e in p)]
    if not uni:
        return None
    g = min(uni, key=lambda p: max(e[zi] for e in p))
    deg = max(e[zi] for e in g)
    coeffs = [RatFunc.const(E.params, 0)] * (deg + 1)
    for e, c in g.items():
        coeffs[e[zi]] = D.to_ratfunc(c)
    return [f for f, _ in factor_univariate(coeffs, E.params)]
