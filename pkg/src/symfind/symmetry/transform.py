"""Symmetry transformations built from solution branches."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..cas import MPoly, RatFunc, VarRegistry
from ..model import TIME, ControlModel, parse_expression


def transformation_ring(mdl: ControlModel, primitive: str | None = None) -> VarRegistry:
    names = [TIME, *mdl.states, *mdl.inputs, *mdl.params]
    kinds = ["time"] + ["state"] * mdl.n + ["input"] * mdl.m + ["parameter"] * mdl.k
    if primitive is not None:
        names.append(primitive)
        kinds.append("transformed-parameter")
    return VarRegistry(names, kinds)


@dataclass
class SymmetryTransformation:
    """``x~_s = state_maps[s]``, ``theta~_p = param_maps[p]``.

    Explicit elements are rational in (t, x, theta). Algebraic elements also
    involve ``primitive``, a root of ``relation`` (irreducible over
    Q(theta)); one such object stands for ``degree`` group elements.
    """

    id: str
    model: ControlModel
    ring: VarRegistry
    state_maps: dict
    param_maps: dict
    primitive: str | None = None
    relation: MPoly | None = None
    degree: int = 1
    real: bool | None = True
    is_identity: bool = False
    branch: int = 0
    specialization: dict | None = None
    notes: list = field(default_factory=list)

    @property
    def explicit(self):
        return self.primitive is None

    def moved(self):
        """Names of states and parameters not mapped to themselves."""
        out = []
        for s, e in self.state_maps.items():
            if e != RatFunc.var(self.ring, s):
                out.append(s)
        for p, e in self.param_maps.items():
            if self.specialization is not None:
                if not (e.is_constant() and e.constant_value() == self.specialization[p]):
                    out.append(p)
            elif e != RatFunc.var(self.ring, p):
                out.append(p)
        return out

    def relation_coefficients(self):
        """Coefficients (MPoly over params, low -> high) of the relation in the primitive."""
        from ..verify import coefficient_of
        deg = self.relation.degree(self.primitive)
        return [coefficient_of(self.relation, self.primitive, k) for k in range(deg + 1)]

    def roots(self, theta: dict):
        """Numeric roots of the relation at parameter values ``theta`` (sorted)."""
        cs = [complex(c.eval(theta)) for c in self.relation_coefficients()]
        rts = np.roots(cs[::-1])
        return sorted((complex(r) for r in rts), key=lambda z: (round(z.real, 9), round(z.imag, 9)))

    def evaluate(self, values: dict, root=None):
        """Numeric images ``(states, params)`` at ``values`` (t, x, theta)."""
        vals = dict(values)
        if self.primitive is not None:
            if root is None:
                raise ValueError("algebraic transformation needs a root of its relation")
            vals[self.primitive] = root
        vals.setdefault(TIME, 0)
        xs = {s: e.eval(vals) for s, e in self.state_maps.items()}
        ps = {p: e.eval(vals) for p, e in self.param_maps.items()}
        return xs, ps

    def to_json(self):
        d = {
            "id": self.id,
            "identity": self.is_identity,
            "explicit": self.explicit,
            "degree": self.degree,
            "real": _real_label(self.real),
            "states": {s: str(e) for s, e in self.state_maps.items()},
            "params": {p: str(e) for p, e in self.param_maps.items()},
        }
        if not self.explicit:
            d["primitive"] = self.primitive
            d["relation"] = str(self.relation)
        if self.specialization:
            d["specialization"] = {p: str(v) for p, v in self.specialization.items()}
        return d

    @classmethod
    def from_json(cls, mdl: ControlModel, d: dict):
        """Rebuild an element from its report entry (maps are re-parsed exactly)."""
        prim = d.get("primitive")
        ring = transformation_ring(mdl, prim)
        smaps = {s: parse_expression(d["states"][s], ring) for s in mdl.states}
        pmaps = {p: parse_expression(d["params"][p], ring) for p in mdl.params}
        relation = parse_expression(d["relation"], ring).num if prim else None
        real = {"true": True, "false": False}.get(d.get("real"))
        spec = d.get("specialization")
        spec = {p: Fraction(v) for p, v in spec.items()} if spec else None
        return cls(d["id"], mdl, ring, smaps, pmaps, prim, relation, d.get("degree", 1), real,
                   bool(d.get("identity")), 0, spec)

    def describe(self):
        lines = [f"{self.id}{' (identity)' if self.is_identity else ''}:"]
        for s, e in self.state_maps.items():
            if self.is_identity or e != RatFunc.var(self.ring, s):
                lines.append(f"  {s}~ = {e}")
        for p, e in self.param_maps.items():
            if self.is_identity or self.specialization is not None or e != RatFunc.var(self.ring, p):
                lines.append(f"  {p}~ = {e}")
        if not self.explicit:
            lines.append(f"  where {self.relation} = 0  ({self.degree} elements, real: {_real_label(self.real)})")
        return "\n".join(lines)


def _real_label(v):
    return "true" if v is True else ("false" if v is False else "unknown")


def extract_transformations(result, asys, prefix="g"):
    """One SymmetryTransformation per solution branch (identity first)."""
    mdl = asys.model
    az = asys.ansatz
    out = []
    for bi, br in enumerate(result.branches):
        prim = None if br.rational else br.primitive
        ring = transformation_ring(mdl, prim)
        pvar = RatFunc.var(ring, prim) if prim else None

        def value(u):
            cs = br.values[u]
            acc = RatFunc.const(ring, 0)
            for k, c in enumerate(cs):
                if c:
                    term = c.to_ring(ring)
                    if k:
                        term = term * pvar ** k
                    acc = acc + term
            return acc

        smaps, pmaps = {}, {}
        for s in mdl.states:
            smaps[s] = _family_value(ring, mdl, az.state_terms[s], value)
        for p in mdl.params:
            pmaps[p] = _family_value(ring, mdl, az.param_terms[p], value)
        relation = None
        if prim:
            from ..algsolve.factor import format_univariate
            relation = format_univariate(br.minpoly, prim, br.params).to_ring(ring)
        tr = SymmetryTransformation(f"{prefix}{bi}", mdl, ring, smaps, pmaps, prim, relation, br.degree,
                                    br.real, False, bi, asys.specialization)
        tr.is_identity = br.rational and not tr.moved()
        out.append(tr)
    out.sort(key=lambda t: (not t.is_identity, not t.explicit, t.branch))
    for i, t in enumerate(out):
        t.id = f"{prefix}{i}"
    return out


def _family_value(ring, mdl, terms, value):
    acc = RatFunc.const(ring, 0)
    for t in terms:
        v = value(t.unknown)
        if not v:
            continue
        mono = {TIME: t.tpow} if t.tpow else {}
        for s, k in zip(mdl.states, t.xexp):
            if k:
                mono[s] = k
        acc = acc + v * MPoly.monomial(ring, mono) if mono else acc + v
    return acc


def identity_transformation(mdl: ControlModel, id="g0"):
    ring = transformation_ring(mdl)
    return SymmetryTransformation(id, mdl, ring, {s: RatFunc.var(ring, s) for s in mdl.states},
                                  {p: RatFunc.var(ring, p) for p in mdl.params}, is_identity=True)
