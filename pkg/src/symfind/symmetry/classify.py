"""Identifiability and observability verdicts from found symmetries."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..cas import MPoly, RatFunc
from ..errors import SymfindError, ZeroDenominatorError
from ..model import TIME, ControlModel, parse_expression
from .transform import transformation_ring

QUALIFIER = "w.r.t. symmetries within the ansatz bounds"

_LABELS = {
    ("state", "global"): "globally observable",
    ("state", "sling"): "locally but not globally observable",
    ("state", "unidentifiable"): "not locally observable",
    ("state", "unknown"): "unknown",
    ("param", "global"): "globally identifiable",
    ("param", "sling"): "SLING",
    ("param", "unidentifiable"): "not locally identifiable",
    ("param", "unknown"): "unknown",
}


@dataclass
class Verdict:
    name: str
    kind: str  # "state" | "param"
    code: str  # "global" | "sling" | "unidentifiable" | "unknown"
    witnesses: list = field(default_factory=list)
    reason: str = ""

    @property
    def label(self):
        text = _LABELS[(self.kind, self.code)]
        return f"{text} ({QUALIFIER})" if self.code == "global" else text

    def to_json(self):
        d = {"verdict": self.code, "label": self.label, "witnesses": list(self.witnesses)}
        if self.code == "global":
            d["qualifier"] = QUALIFIER
        if self.reason:
            d["reason"] = self.reason
        return d


# ---------------------------------------------------------------- generators

@dataclass
class Generator:
    """Infinitesimal generator ``sum xi_s d/dx_s + sum zeta_p d/dtheta_p``."""

    id: str
    xi: dict  # state -> MPoly over (t, x, u, theta)
    zeta: dict  # param -> MPoly

    def moved(self):
        return [s for s, e in self.xi.items() if e] + [p for p, e in self.zeta.items() if e]

    def to_json(self):
        return {"id": self.id, "xi": {s: str(e) for s, e in self.xi.items()},
                "zeta": {p: str(e) for p, e in self.zeta.items()}}


def generators_from_nullspace(mdl: ControlModel, lin, ns) -> list[Generator]:
    ring = transformation_ring(mdl)
    out = []
    for k, vec in enumerate(ns.vectors):
        xi = {s: MPoly.zero(ring) for s in mdl.states}
        zeta = {p: MPoly.zero(ring) for p in mdl.params}
        for col, coef in vec.items():
            kind, of, tpow, xexp = lin.column_info[col]
            mono = {TIME: tpow} if tpow else {}
            mono.update({s: e for s, e in zip(mdl.states, xexp) if e})
            term = coef.to_ring(ring) * MPoly.monomial(ring, mono)
            if kind == "xi":
                xi[of] = xi[of] + term
            else:
                zeta[of] = zeta[of] + term
        out.append(Generator(f"v{k + 1}", xi, zeta))
    return out


# ---------------------------------------------------------------- bounds

@dataclass
class Bounds:
    """Open intervals per variable plus strict inequalities ``expr > 0``."""

    intervals: dict = field(default_factory=dict)  # name -> (lo | None, hi | None)
    constraints: list = field(default_factory=list)  # (text, RatFunc over the model ring)

    @classmethod
    def build(cls, mdl: ControlModel, positive=False, intervals=None, constraints=()):
        iv = {}
        if positive:
            iv.update({n: (Fraction(0), None) for n in (*mdl.states, *mdl.params)})
        for name, (lo, hi) in (intervals or {}).items():
            if name not in mdl.states and name not in mdl.params:
                raise SymfindError(f"bounds given for unknown variable {name!r}")
            if lo is not None and hi is not None and not lo < hi:
                raise SymfindError(f"empty interval for {name!r}")
            iv[name] = (lo, hi)
        cons = [(text, parse_inequality(text, mdl)) for text in constraints]
        return cls(iv, cons)

    def __bool__(self):
        return bool(self.intervals or self.constraints)

    def satisfied(self, values) -> bool:
        for name, (lo, hi) in self.intervals.items():
            v = values.get(name)
            if v is None:
                continue
            if isinstance(v, complex):
                if abs(v.imag) > 1e-9 * (1 + abs(v)):
                    return False
                v = v.real
            if (lo is not None and not v > lo) or (hi is not None and not v < hi):
                return False
        for _, expr in self.constraints:
            try:
                v = complex(expr.eval(values))
            except ZeroDenominatorError:
                return False
            if abs(v.imag) > 1e-9 * (1 + abs(v)) or not v.real > 0:
                return False
        return True

    def sample(self, mdl: ControlModel, rng: random.Random):
        vals = {TIME: 0.0}
        for n in (*mdl.states, *mdl.params):
            lo, hi = self.intervals.get(n, (None, None))
            if lo is not None and hi is not None:
                v = rng.uniform(float(lo), float(hi))
            elif lo is not None:
                v = float(lo) + rng.uniform(0.01, 3.0)
            elif hi is not None:
                v = float(hi) - rng.uniform(0.01, 3.0)
            else:
                v = rng.uniform(-3.0, 3.0)
            vals[n] = v
        for u in mdl.inputs:
            vals[u] = rng.uniform(0.0, 1.0)
        return vals

    def to_json(self):
        return {
            "intervals": {n: [None if lo is None else str(lo), None if hi is None else str(hi)]
                          for n, (lo, hi) in sorted(self.intervals.items())},
            "constraints": [f"{text}" for text, _ in self.constraints],
        }


def parse_inequality(text: str, mdl: ControlModel) -> RatFunc:
    """``"a > b"``, ``"a < b"`` or a bare expression (meaning ``expr > 0``) as ``lhs - rhs``."""
    for op in (">", "<"):
        if op in text:
            lhs, rhs = text.split(op, 1)
            a = parse_expression(lhs.strip(), mdl.ring)
            b = parse_expression(rhs.strip(), mdl.ring)
            return a - b if op == ">" else b - a
    return parse_expression(text.strip(), mdl.ring)


def parse_interval(spec: str):
    """``NAME=LO:HI`` with exact rational ends; an empty end is unbounded."""
    if "=" not in spec or ":" not in spec:
        raise SymfindError(f"bounds must look like NAME=LO:HI, got {spec!r}")
    name, rng = spec.split("=", 1)
    lo, hi = rng.split(":", 1)
    conv = lambda s: Fraction(s.strip()) if s.strip() else None  # noqa: E731
    try:
        return name.strip(), (conv(lo), conv(hi))
    except ValueError as exc:
        raise SymfindError(f"bad interval end in {spec!r}") from exc


def biological_filter(mdl: ControlModel, transformations, bounds: Bounds, seed=0, samples=200):
    """Split elements into those that can map a feasible point to a feasible point and the rest.

    An element is kept when, at some sampled feasible point, one of its real
    instances maps into the feasible region. Non-real branches are dropped.
    Returns ``(kept, discarded)`` with ``discarded`` a list of ``(id, reason)``.
    """
    rng = random.Random(seed)
    points = []
    for _ in range(200 * samples):
        if len(points) >= samples:
            break
        v = bounds.sample(mdl, rng)
        if bounds.satisfied(v):
            points.append(v)
    if not points:
        raise SymfindError("no feasible sample points for the given bounds")
    kept, discarded = [], []
    for tr in transformations:
        if tr.is_identity:
            kept.append(tr)
            continue
        if tr.real is False:
            discarded.append((tr.id, "non-real"))
            continue
        if _feasible_somewhere(tr, points, bounds):
            kept.append(tr)
        else:
            discarded.append((tr.id, f"maps none of {len(points)} sampled feasible points into the bounds"))
    return kept, discarded


def _feasible_somewhere(tr, points, bounds):
    for v in points:
        if tr.specialization:
            v = dict(v)
            v.update({p: float(c) for p, c in tr.specialization.items()})
            if not bounds.satisfied(v):
                continue
        roots = [None]
        if tr.primitive is not None:
            roots = [r for r in tr.roots(v) if abs(r.imag) <= 1e-9 * (1 + abs(r))]
        for r in roots:
            try:
                xs, ps = tr.evaluate(v, None if r is None else r.real)
            except (ZeroDenominatorError, ZeroDivisionError):
                continue
            img = dict(v)
            img.update(xs)
            img.update(ps)
            if bounds.satisfied(img):
                return True
    return False


# ---------------------------------------------------------------- verdicts

def _family(ansatz, name):
    if name in ansatz.state_terms:
        return ansatz.state_terms[name]
    return ansatz.param_terms[name]


def _identity_value(ansatz, unknown, params_ring):
    v = ansatz.identity_point()[unknown]
    if isinstance(v, tuple):
        return RatFunc.var(params_ring, v[1])
    return RatFunc.const(params_ring, v)


def classify(mdl: ControlModel, states=None, params=None, transformations=None, generators=(),
             unknown_values=None, ansatz=None, params_ring=None, removed=(), fixed=(), inconclusive=False):
    """One Verdict per state and parameter.

    ``states``/``params`` default to the model's; names in ``removed`` or
    ``fixed`` get "unknown". ``transformations`` come from a zero-dimensional
    solution set; ``unknown_values`` (with ``ansatz``) from a
    positive-dimensional one.
    """
    states = tuple(states or mdl.states)
    params = tuple(params or mdl.params)
    out = {}
    for kind, names in (("state", states), ("param", params)):
        for n in names:
            out[n] = Verdict(n, kind, "global")

    for g in generators:
        for n in g.moved():
            if n in out:
                out[n].code = "unidentifiable"
                out[n].witnesses.append(g.id)
                out[n].reason = "moved by a continuous symmetry"

    def sling(n, witness, reason):
        v = out.get(n)
        if v is None or v.code == "unidentifiable":
            return
        v.code = "sling"
        v.witnesses.append(witness)
        v.reason = reason

    if inconclusive:
        for v in out.values():
            if v.code == "global":
                v.code = "unknown"
                v.reason = "finite analysis inconclusive"
    elif unknown_values is not None:
        for n, v in out.items():
            if v.code == "unidentifiable" or n not in (mdl.states + mdl.params):
                continue
            infinite, moved = [], []
            for term in _family(ansatz, n):
                uv = unknown_values.get(term.unknown)
                if uv is None:
                    continue
                if not uv.finite:
                    infinite.append(term.unknown)
                elif uv.count() != 1 or uv.rational_values() != [_identity_value(ansatz, term.unknown, params_ring)]:
                    moved.append(term.unknown)
            if infinite:
                v.code = "unidentifiable"
                v.witnesses.extend(infinite)
                v.reason = "infinitely many values on a positive-dimensional symmetry set"
            elif moved:
                v.code = "sling"
                v.witnesses.extend(moved)
                v.reason = "finitely many values on a positive-dimensional symmetry set"
    else:
        for tr in transformations or ():
            if tr.is_identity:
                continue
            for n in tr.moved():
                sling(n, tr.id, "moved by a discrete symmetry")

    for n in removed:
        if n in out:
            out[n] = Verdict(n, out[n].kind, "unknown", reason="state removed before the analysis")
    for n in fixed:
        if n in out:
            out[n] = Verdict(n, out[n].kind, "unknown", reason="parameter fixed by assumption")
    return out
