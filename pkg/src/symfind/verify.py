"""Independent checks of claimed symmetries.

Two channels: exact residuals of the invariance conditions, and a fixed-step
RK4 oracle comparing output trajectories of the original and transformed
systems.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .cas import MPoly, RatFunc, substitute
from .errors import IntegrationError, SymfindError, ZeroDenominatorError
from .model import TIME, ControlModel

DEFAULT_TOL = 1e-8
DEFAULT_H = 1e-3
DEFAULT_SPAN = (0.0, 10.0)
# scenarios whose transformation denominators come this close to zero are resampled
_DEN_MARGIN = 0.05


# ---------------------------------------------------------------- symbolic

def reduce_by_relation(p: MPoly, var: str, rel: MPoly) -> MPoly:
    """Pseudo-remainder of ``p`` by ``rel`` with respect to ``var``, made primitive."""
    rel = rel.to_ring(p.ring) if rel.ring != p.ring else rel
    dq = rel.degree(var)
    lc_q = coefficient_of(rel, var, dq)
    v = MPoly.var(p.ring, var)
    while p and p.degree(var) >= dq:
        dp = p.degree(var)
        p = lc_q * p - coefficient_of(p, var, dp) * v ** (dp - dq) * rel
    return p.primitive() if p else p


def coefficient_of(p: MPoly, var: str, k: int) -> MPoly:
    """Coefficient of ``var^k`` in ``p``, over the same registry."""
    i = p.ring.index(var)
    terms = {e[:i] + (0,) + e[i + 1:]: c for e, c in p.terms.items() if e[i] == k}
    return MPoly(p.ring, terms)


@dataclass
class Residual:
    condition: str  # "state:<name>", "param:<name>" or "output:<name>"
    value: RatFunc

    def to_json(self):
        return {"condition": self.condition, "residual": str(self.value)}


def symbolic_residual(model: ControlModel, tr) -> list[Residual]:
    """Residuals of state invariance, Theta-constancy and output invariance.

    All residuals are exactly zero for a genuine symmetry. Algebraic elements
    are reduced modulo their defining relation; specialized elements are
    checked at their parameter point.
    """
    ring = tr.ring
    binds = {s: tr.state_maps[s] for s in model.states}
    binds.update({p: tr.param_maps[p] for p in model.params})
    for s, e in binds.items():
        if e.den.is_zero():
            raise ZeroDenominatorError(f"map for {s} has a zero denominator")
    f = {s: model.f(s).to_ring(ring) for s in model.states}

    def total_derivative(expr: RatFunc) -> RatFunc:
        acc = expr.diff(TIME)
        for s in model.states:
            d = expr.diff(s)
            if d:
                acc = acc + d * f[s]
        return acc

    out = []
    for s in model.states:
        lhs = total_derivative(tr.state_maps[s])
        rhs = substitute(model.f(s), binds, ring)
        out.append(Residual(f"state:{s}", lhs - rhs))
    for p in model.params:
        out.append(Residual(f"param:{p}", total_derivative(tr.param_maps[p])))
    for name, h in model.outputs:
        out.append(Residual(f"output:{name}", substitute(h, binds, ring) - h.to_ring(ring)))
    return [_finalize(r, tr) for r in out]


def _finalize(r: Residual, tr) -> Residual:
    v = r.value
    if not v:
        return r
    num = v.num
    if tr.specialization:
        num = num.partial_eval(tr.specialization)
        if not num:
            return Residual(r.condition, RatFunc.const(v.ring, 0))
    if tr.primitive is not None:
        num = reduce_by_relation(num, tr.primitive, tr.relation)
        if not num:
            return Residual(r.condition, RatFunc.const(v.ring, 0))
    return Residual(r.condition, RatFunc(num, v.den) if num is not v.num else v)


def residual_ok(residuals) -> bool:
    return all(not r.value for r in residuals)


# ---------------------------------------------------------------- numeric

def _expr_source(p: MPoly, index) -> str:
    terms = []
    for e, c in p.terms.items():
        factors = [repr(float(c))]
        for i, k in enumerate(e):
            if k:
                factors.append(f"v[{index[i]}]" if k == 1 else f"v[{index[i]}]**{k}")
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0.0"


def compile_ratfuncs(exprs, names):
    """Return ``fn(v) -> (nums, dens)`` evaluating RatFuncs on a value list ordered as ``names``."""
    pos = {n: i for i, n in enumerate(names)}
    nums, dens = [], []
    for e in exprs:
        index = [pos.get(n) for n in e.ring.names]
        for i, n in enumerate(e.ring.names):
            if index[i] is None and (e.num.degree(n) > 0 or e.den.degree(n) > 0):
                raise SymfindError(f"variable {n!r} has no numeric value")
        nums.append(_expr_source(e.num, index))
        dens.append(_expr_source(e.den, index))
    src = f"lambda v: (({', '.join(nums)},), ({', '.join(dens)},))"
    return eval(src, {"__builtins__": {}})  # noqa: S307 - generated from our own polynomials


@dataclass
class NumericScenario:
    x0: dict
    params: dict
    inputs: dict = field(default_factory=dict)  # input -> coefficients of a polynomial in t, low -> high
    t0: float = DEFAULT_SPAN[0]
    t1: float = DEFAULT_SPAN[1]
    h: float = DEFAULT_H

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise SymfindError("scenario needs t1 > t0")
        if not self.h > 0:
            raise SymfindError("scenario needs a positive step size")

    @property
    def steps(self):
        return int(round((self.t1 - self.t0) / self.h))

    def input_values(self, mdl: ControlModel, t):
        out = []
        for u in mdl.inputs:
            cs = self.inputs.get(u, [])
            out.append(sum(float(c) * t**k for k, c in enumerate(cs)))
        return out

    def to_json(self):
        return {
            "x0": {k: str(v) for k, v in self.x0.items()},
            "params": {k: str(v) for k, v in self.params.items()},
            "inputs": {k: [str(c) for c in v] for k, v in self.inputs.items()},
            "t0": self.t0, "t1": self.t1, "h": self.h,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (steps+1, n, batch)
    outputs: np.ndarray  # (steps+1, l, batch)


class NumericModel:
    """Float evaluation of a model's right-hand sides and outputs."""

    def __init__(self, mdl: ControlModel):
        self.model = mdl
        self.names = list(mdl.ring.names)
        self._rhs = compile_ratfuncs(mdl.rhs, self.names)
        self._out = compile_ratfuncs([h for _, h in mdl.outputs], self.names)

    def _values(self, t, x, u, p):
        return [t, *x, *u, *p]

    def _eval(self, fn, v, what):
        nums, dens = fn(v)
        out = []
        for a, b in zip(nums, dens):
            if np.any(np.abs(b) < 1e-300):
                raise IntegrationError(f"{what} denominator vanishes at t = {float(np.real(v[0])):g}")
            out.append(a / b)
        return out

    def rhs(self, t, x, u, p):
        return self._eval(self._rhs, self._values(t, x, u, p), "right-hand side")

    def outputs(self, t, x, u, p):
        return self._eval(self._out, self._values(t, x, u, p), "output")


def rk4_integrate(mdl: ControlModel, scenario: NumericScenario, x0=None, params=None, inputs=None,
                  numeric=None) -> Trajectory:
    """Classical fixed-step RK4.

    ``x0`` (n lists of length B), ``params`` (k lists) and ``inputs``
    (m lists of polynomial coefficient lists) override the scenario values and
    let B systems share one pass; complex values are allowed.
    """
    nm = numeric or NumericModel(mdl)
    if x0 is None:
        x0 = [[float(scenario.x0[s])] for s in mdl.states]
    if params is None:
        params = [[float(scenario.params[p])] for p in mdl.params]
    if inputs is None:
        inputs = [[[float(c) for c in scenario.inputs.get(u, [])]] for u in mdl.inputs]
    x = [np.asarray(r) for r in x0]
    p = [np.asarray(r) for r in params]
    batch = max([len(r) for r in x] + [len(r) for r in p] + [len(r) for r in inputs] + [1])
    dtype = complex if any(np.iscomplexobj(r) for r in x + p) else float
    x = [np.broadcast_to(r, (batch,)).astype(dtype) for r in x]
    p = [np.broadcast_to(r, (batch,)).astype(dtype) for r in p]
    ucoef = []
    for cols in inputs:
        deg = max((len(c) for c in cols), default=0)
        arr = np.zeros((deg, len(cols)))
        for j, c in enumerate(cols):
            arr[:len(c), j] = [float(v) for v in c]
        ucoef.append(np.broadcast_to(arr, (deg, batch)))

    def uv(t):
        return [sum(c[k] * t**k for k in range(len(c))) + np.zeros(batch) for c in ucoef]

    N, h, t0 = scenario.steps, scenario.h, scenario.t0
    times = t0 + h * np.arange(N + 1)
    states = np.empty((N + 1, mdl.n, batch), dtype=dtype)
    outs = np.empty((N + 1, mdl.l, batch), dtype=dtype)
    with np.errstate(all="ignore"):
        for i in range(N + 1):
            t = times[i]
            u = uv(t)
            states[i] = x
            outs[i] = nm.outputs(t, x, u, p)
            if not (np.all(np.isfinite(states[i])) and np.all(np.isfinite(outs[i]))):
                raise IntegrationError(f"non-finite value at t = {t:g}")
            if i == N:
                break
            um = uv(t + h / 2)
            k1 = nm.rhs(t, x, u, p)
            k2 = nm.rhs(t + h / 2, [a + h / 2 * b for a, b in zip(x, k1)], um, p)
            k3 = nm.rhs(t + h / 2, [a + h / 2 * b for a, b in zip(x, k2)], um, p)
            k4 = nm.rhs(t + h, [a + h * b for a, b in zip(x, k3)], uv(t + h), p)
            x = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)]
    return Trajectory(times, states, outs)


@dataclass
class VerificationResult:
    element: str
    symbolic_ok: bool | None
    residuals: list  # offending residuals only
    numeric_abs: float | None = None
    numeric_rel: float | None = None
    tol: float = DEFAULT_TOL
    scenarios: int = 0
    notes: list = field(default_factory=list)

    @property
    def numeric_ok(self):
        return None if self.numeric_abs is None else self.numeric_abs < self.tol

    @property
    def passed(self):
        return self.symbolic_ok is not False and self.numeric_ok is not False

    def to_json(self):
        return {
            "element": self.element,
            "symbolic": None if self.symbolic_ok is None else ("pass" if self.symbolic_ok else "fail"),
            "offending": [r.to_json() for r in self.residuals],
            "numeric_abs": self.numeric_abs,
            "numeric_rel": self.numeric_rel,
            "tol": self.tol,
            "scenarios": self.scenarios,
            "passed": self.passed,
            "notes": list(self.notes),
        }


def _instances(tr, scenario: NumericScenario, mdl: ControlModel):
    """Transformed (x0, params) columns, one per root for algebraic elements."""
    vals = {TIME: scenario.t0}
    vals.update({s: float(scenario.x0[s]) for s in mdl.states})
    vals.update({p: float(scenario.params[p]) for p in mdl.params})
    for u, v in zip(mdl.inputs, scenario.input_values(mdl, scenario.t0)):
        vals[u] = v
    roots = [None] if tr.primitive is None else tr.roots(vals)
    out = []
    for r in roots:
        try:
            xs, ps = tr.evaluate(vals, r)
        except ZeroDenominatorError as exc:
            raise IntegrationError(f"transformation undefined at the scenario: {exc}") from exc
        out.append(([xs[s] for s in mdl.states], [ps[p] for p in mdl.params]))
    return out


def output_deviation(mdl: ControlModel, trs, scenarios, numeric=None):
    """Max output deviation ``(abs, rel)`` per transformation over all scenarios.

    Original and transformed systems of every scenario are integrated in one
    batched pass; the scenarios must share their time grid.
    """
    if isinstance(scenarios, NumericScenario):
        scenarios = [scenarios]
    x_cols, p_cols, u_cols, ref_col, owner = [], [], [], [], []
    for sc in scenarios:
        base = len(x_cols)
        ucs = [[float(c) for c in sc.inputs.get(u, [])] for u in mdl.inputs]
        x_cols.append([float(sc.x0[s]) for s in mdl.states])
        p_cols.append([float(sc.params[p]) for p in mdl.params])
        u_cols.append(ucs)
        ref_col.append(base)
        owner.append(None)
        for j, tr in enumerate(trs):
            for xs, ps in _instances(tr, sc, mdl):
                x_cols.append(xs)
                p_cols.append(ps)
                u_cols.append(ucs)
                ref_col.append(base)
                owner.append(j)
    cplx = any(isinstance(v, complex) for col in x_cols + p_cols for v in col)
    dt = complex if cplx else float
    x0 = [np.array([c[i] for c in x_cols], dtype=dt) for i in range(mdl.n)]
    params = [np.array([c[i] for c in p_cols], dtype=dt) for i in range(mdl.k)]
    inputs = [[c[i] for c in u_cols] for i in range(mdl.m)]
    traj = rk4_integrate(mdl, scenarios[0], x0, params, inputs, numeric)
    Y = traj.outputs
    ab = [0.0] * len(trs)
    rel = [0.0] * len(trs)
    for col, j in enumerate(owner):
        if j is None:
            continue
        ref = Y[:, :, ref_col[col]]
        d = float(np.max(np.abs(Y[:, :, col] - ref))) if Y.shape[1] else 0.0
        if math.isnan(d):
            d = math.inf
        ab[j] = max(ab[j], d)
        rel[j] = max(rel[j], d / max(float(np.max(np.abs(ref))), 1e-300))
    return list(zip(ab, rel))


def numeric_invariance(mdl: ControlModel, tr, scenario: NumericScenario, tol=DEFAULT_TOL) -> VerificationResult:
    (ab, rel), = output_deviation(mdl, [tr], [scenario])
    return VerificationResult(tr.id, None, [], ab, rel, tol, 1)


def random_scenarios(mdl: ControlModel, seed=0, count=3, avoid=(), h=DEFAULT_H, span=DEFAULT_SPAN):
    """Seeded scenarios with values in [1/5, 1]; polynomials in ``avoid`` stay away from zero."""
    rng = random.Random(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200 * count:
            raise SymfindError("could not find scenarios avoiding the recorded denominators")
        x0 = {s: Fraction(rng.randint(20, 100), 100) for s in mdl.states}
        ps = {p: Fraction(rng.randint(20, 100), 100) for p in mdl.params}
        inputs = {u: [Fraction(rng.randint(20, 100), 100), Fraction(rng.randint(0, 10), 100)] for u in mdl.inputs}
        vals = {TIME: Fraction(0), **x0, **ps}
        vals.update({u: c[0] for u, c in inputs.items()})
        ok = True
        for a in avoid:
            v = a.eval({n: vals.get(n, 0) for n in a.ring.names})
            if abs(v) < _DEN_MARGIN:
                ok = False
                break
        if ok:
            out.append(NumericScenario(x0, ps, inputs, span[0], span[1], h))
    return out


def transformation_denominators(tr):
    """Polynomials that must not vanish for ``tr`` to be evaluable (params only when possible)."""
    out = []
    for e in list(tr.state_maps.values()) + list(tr.param_maps.values()):
        if not e.den.is_constant():
            out.append(e.den)
    if tr.primitive is not None:
        out.append(coefficient_of(tr.relation, tr.primitive, tr.relation.degree(tr.primitive)))
    return out


def perturbed(tr, amount=Fraction(1, 100)):
    """Copy of ``tr`` with its first parameter map (else first state map) shifted by ``amount``."""
    smaps, pmaps = dict(tr.state_maps), dict(tr.param_maps)
    if pmaps:
        key = next(iter(pmaps))
        pmaps[key] = pmaps[key] + amount
    else:
        key = next(iter(smaps))
        smaps[key] = smaps[key] + amount
    return replace(tr, id=f"{tr.id}+perturbed", state_maps=smaps, param_maps=pmaps, is_identity=False)


def verify_transformations(mdl: ControlModel, trs, seed=0, tol=DEFAULT_TOL, scenarios=3, symbolic=True,
                           h=DEFAULT_H, span=DEFAULT_SPAN):
    """Symbolic and numeric checks of every element on ``scenarios`` seeded scenarios."""
    avoid = [d for tr in trs for d in transformation_denominators(tr)]
    avoid += [e.den for e in mdl.rhs if not e.den.is_constant()]
    results = []
    for tr in trs:
        res = symbolic_residual(mdl, tr) if symbolic else []
        bad = [r for r in res if r.value]
        results.append(VerificationResult(tr.id, (not bad) if symbolic else None, bad, 0.0, 0.0, tol, 0))
    specialized = any(tr.specialization for tr in trs)
    scs = random_scenarios(mdl, seed, scenarios, avoid, h, span)
    if specialized:
        point = next(tr.specialization for tr in trs if tr.specialization)
        scs = [replace(s, params=dict(point)) for s in scs]
    for r, (ab, rel) in zip(results, output_deviation(mdl, trs, scs)):
        r.numeric_abs, r.numeric_rel, r.scenarios = ab, rel, len(scs)
    return results
