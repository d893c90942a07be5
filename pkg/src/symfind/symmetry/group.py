"""Composition of discrete symmetries and identification of the group they form."""

from __future__ import annotations

import cmath
import itertools
import random
from dataclasses import dataclass, field, replace

import numpy as np

from ..cas import substitute
from ..errors import SymfindError, ZeroDenominatorError
from ..model import TIME
from .transform import SymmetryTransformation

_MATCH_TOL = 1e-7
_POINTS = 3


def compose(a: SymmetryTransformation, b: SymmetryTransformation, elements=None):
    """``a o b``: the maps of ``a`` evaluated at the images of ``b``.

    Returns ``(composite, match)`` where ``match`` is the element of
    ``elements`` equal to the composite (or None when it is not among them).
    """
    if not (a.explicit and b.explicit):
        raise SymfindError("exact composition needs explicit rational elements")
    if a.specialization or b.specialization:
        raise SymfindError("elements found at a specialized parameter point cannot be composed")
    ring = a.ring
    binds = dict(b.state_maps)
    binds.update(b.param_maps)
    smaps = {s: substitute(e, binds, ring) for s, e in a.state_maps.items()}
    pmaps = {p: substitute(e, binds, ring) for p, e in a.param_maps.items()}
    c = replace(a, id=f"{a.id}*{b.id}", state_maps=smaps, param_maps=pmaps, notes=[])
    c.is_identity = not c.moved()
    match = None
    for e in elements or ():
        if e.explicit and e.state_maps == smaps and e.param_maps == pmaps:
            match = e
            break
    return c, match


# ---------------------------------------------------------------- catalog

def _cyclic_orders(n):
    from math import gcd
    return [n // gcd(k, n) for k in range(n)]


def _product_orders(*ns):
    from math import lcm
    out = []
    for combo in itertools.product(*[_cyclic_orders(n) for n in ns]):
        out.append(lcm(*combo))
    return out


def _abelian_catalog(max_order=12):
    # invariant factor decompositions n1 | n2 | ... written largest first
    out = {}

    def rec(remaining, factors):
        if remaining == 1:
            if factors:
                name = "x".join(f"C{f}" for f in sorted(factors, reverse=True))
                out[name] = sorted(_product_orders(*factors))
            return
        for f in range(2, remaining + 1):
            if remaining % f == 0 and (not factors or f % factors[-1] == 0):
                rec(remaining // f, factors + [f])

    for n in range(2, max_order + 1):
        rec(n, [])
    out["C1"] = [1]
    return out


_NONABELIAN = {
    "S3": [1, 2, 2, 2, 3, 3],
    "D4": [1, 2, 2, 2, 2, 2, 4, 4],
    "Q8": [1, 2, 4, 4, 4, 4, 4, 4],
    "D5": [1, 2, 2, 2, 2, 2, 5, 5, 5, 5],
    "A4": [1, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3],
    "D6": [1, 2, 2, 2, 2, 2, 2, 2, 3, 3, 6, 6],
    "Dic3": [1, 2, 3, 3, 4, 4, 4, 4, 4, 4, 6, 6],
}
_ABELIAN = _abelian_catalog()


def name_group(orders, abelian):
    """Catalog name for a group of order <= 12 given its element orders (None if unmatched)."""
    key = sorted(orders)
    table = _ABELIAN if abelian else _NONABELIAN
    hits = [n for n, o in table.items() if o == key]
    return hits[0] if len(hits) == 1 else None


# ---------------------------------------------------------------- tables

def table_orders(table):
    """Element orders from a Cayley table ``table[i][j] = index of e_i o e_j``; identity found by search."""
    n = len(table)
    ident = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    orders = []
    for i in range(n):
        k, cur = 1, i
        while cur != ident:
            cur = table[i][cur]
            k += 1
            if k > n:
                return None
        orders.append(k)
    return orders


def is_abelian(table):
    n = len(table)
    return all(table[i][j] == table[j][i] for i in range(n) for j in range(i + 1, n))


@dataclass
class NumericElement:
    transformation: SymmetryTransformation
    root: complex | None  # root of the relation at the base point (None for explicit elements)

    @property
    def label(self):
        return self.transformation.id if self.root is None else f"{self.transformation.id}[{self.root:.6g}]"


class _NumericAction:
    """Evaluate elements at complex points, continuing algebraic roots along paths."""

    def __init__(self, mdl, rng):
        self.model = mdl
        self.rng = rng
        self._cache = {}

    def random_point(self):
        r = self.rng
        vals = {TIME: complex(r.uniform(0.2, 1), 0)}
        for n in (*self.model.states, *self.model.inputs, *self.model.params):
            vals[n] = cmath.rect(r.uniform(0.5, 1.5), r.uniform(-1.2, 1.2))
        return vals

    def _track(self, tr, theta0, theta1):
        """Roots at ``theta1`` continued from the sorted roots at ``theta0`` (same order)."""
        key = (str(tr.relation), tuple(theta1[p] for p in self.model.params))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        mid = {p: (theta0[p] + theta1[p]) / 2 + cmath.rect(self.rng.uniform(0.2, 0.6), self.rng.uniform(0, 6.28))
               for p in self.model.params}
        cur = np.array(tr.roots(theta0))
        for a, b in ((theta0, mid), (mid, theta1)):
            lam, dl = 0.0, 1 / 32
            while lam < 1:
                step = min(dl, 1 - lam)
                th = {p: a[p] + (lam + step) * (b[p] - a[p]) for p in self.model.params}
                new = np.array(tr.roots(th))
                nxt = _match(cur, new)
                if nxt is None:
                    dl = step / 2
                    if dl < 1e-9:
                        raise ZeroDivisionError("root continuation failed")
                    continue
                cur, lam, dl = nxt, lam + step, min(2 * step, 1 / 8)
        self._cache[key] = list(cur)
        return self._cache[key]

    def apply(self, el: NumericElement, point, base):
        tr = el.transformation
        root = None
        if el.root is not None:
            th0 = {p: base[p] for p in self.model.params}
            th1 = {p: point[p] for p in self.model.params}
            if th0 == th1:
                root = el.root
            else:
                base_roots = tr.roots(th0)
                k = min(range(len(base_roots)), key=lambda i: abs(base_roots[i] - el.root))
                root = self._track(tr, th0, th1)[k]
        xs, ps = tr.evaluate(point, root)
        out = dict(point)
        out.update(xs)
        out.update(ps)
        return out


def _match(cur, new):
    """Continue roots ``cur`` to ``new`` when the step is unambiguous."""
    if len(new) < 2:
        return new
    sep = min(abs(a - b) for a, b in itertools.combinations(new, 2))
    d = np.abs(cur[:, None] - new[None, :])
    idx = d.argmin(axis=1)
    if len(set(idx.tolist())) != len(new) or d[np.arange(len(cur)), idx].max() > 0.25 * sep:
        return None
    return new[idx]


def _close(a, b, names):
    return all(abs(a[n] - b[n]) <= _MATCH_TOL * (1 + abs(b[n])) for n in names)


def numeric_table(mdl, transformations, seed=0):
    """Cayley table of all elements (algebraic branches expanded over their roots) at a random complex point.

    Returns ``(elements, table)``; ``table`` entries are indices or None when
    a composite matches no element.
    """
    rng = random.Random(seed)
    act = _NumericAction(mdl, rng)
    names = [*mdl.states, *mdl.params]
    for _ in range(20):
        base = act.random_point()
        try:
            elements = []
            for tr in transformations:
                if tr.explicit:
                    elements.append(NumericElement(tr, None))
                else:
                    for r in tr.roots(base):
                        elements.append(NumericElement(tr, r))
            images = [act.apply(e, base, base) for e in elements]
            table = []
            for a in elements:
                row = []
                for img in images:
                    c = act.apply(a, img, base)
                    hits = [k for k, im in enumerate(images) if _close(c, im, names)]
                    row.append(hits[0] if len(hits) == 1 else None)
                table.append(row)
            return elements, table
        except (ZeroDenominatorError, ZeroDivisionError):
            continue
    raise SymfindError("no usable evaluation point for the numeric composition table")


@dataclass
class SymmetryGroup:
    order: int
    elements: list  # element labels (algebraic branches expanded)
    abelian: bool | None
    element_orders: list  # sorted multiset
    name: str | None
    exact: bool  # every element explicit and the table was built symbolically
    table: list | None = None  # table[i][j] = label of elements[i] o elements[j]
    explicit_orders: dict = field(default_factory=dict)  # id -> order for explicit elements
    warnings: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        d = {
            "order": self.order,
            "elements": list(self.elements),
            "abelian": self.abelian,
            "element_orders": list(self.element_orders),
            "group_name": self.name,
            "exact": self.exact,
            "explicit_orders": dict(self.explicit_orders),
            "warnings": list(self.warnings),
            "notes": list(self.notes),
        }
        if self.table is not None:
            d["table"] = [list(r) for r in self.table]
        return d


def _exact_table(explicit, warnings):
    ids = [t.id for t in explicit]
    table = []
    for a in explicit:
        row = []
        for b in explicit:
            c, m = compose(a, b, explicit)
            if m is None:
                warnings.append(f"{a.id} o {b.id} is not among the found elements; solutions may be missing")
                row.append(None)
            else:
                row.append(m.id)
        table.append(row)
    ident = next((t.id for t in explicit if t.is_identity), None)
    if ident is None:
        warnings.append("identity not among the found elements")
    else:
        for i, a in enumerate(explicit):
            if ident not in table[i]:
                warnings.append(f"{a.id} has no inverse among the found elements")
    return ids, table


def group_structure(mdl, transformations, seed=0) -> SymmetryGroup:
    """Composition table, element orders, abelianness and catalog name.

    Explicit elements are composed exactly. Algebraic branches are expanded
    over their roots and handled numerically at ``3`` random complex points
    whose order statistics must agree.
    """
    trs = list(transformations)
    order = sum(t.degree for t in trs)
    warnings, notes = [], []
    if any(t.specialization for t in trs):
        notes.append("elements found at a specialized parameter point; composition table not computed")
        return SymmetryGroup(order, [t.id for t in trs], None, [], None, False, None, {}, warnings, notes)
    explicit = [t for t in trs if t.explicit]
    ids, table = _exact_table(explicit, warnings)
    explicit_orders = {}
    if all(None not in r for r in table) and explicit:
        idx = {x: i for i, x in enumerate(ids)}
        itable = [[idx[x] for x in r] for r in table]
        eo = table_orders(itable)
        if eo is not None:
            explicit_orders = dict(zip(ids, eo))
    if len(explicit) == len(trs):
        if explicit_orders:
            itable = [[ids.index(x) for x in r] for r in table]
            ab = is_abelian(itable)
            orders = sorted(explicit_orders.values())
            return SymmetryGroup(order, ids, ab, orders, name_group(orders, ab), True, table,
                                 explicit_orders, warnings, notes)
        return SymmetryGroup(order, ids, None, [], None, True, table, explicit_orders, warnings, notes)

    # algebraic elements: numeric tables at several points
    stats = []
    first = None
    for k in range(_POINTS):
        elements, ntable = numeric_table(mdl, trs, seed=seed * 1009 + k)
        if any(None in r for r in ntable):
            warnings.append("numeric composition leaves the found elements; solutions may be missing")
            stats.append(None)
            continue
        no = table_orders(ntable)
        stats.append((tuple(sorted(no)) if no else None, is_abelian(ntable)))
        if first is None:
            first = (elements, ntable)
    notes.append(f"algebraic elements: table and orders estimated numerically at {_POINTS} complex points")
    if first is None or len(set(stats)) != 1 or stats[0][0] is None:
        notes.append("numeric estimates disagree between points; group structure inconclusive")
        return SymmetryGroup(order, [t.id for t in trs], None, [], None, False, None, explicit_orders,
                             warnings, notes)
    elements, ntable = first
    labels = [e.label for e in elements]
    orders, ab = list(stats[0][0]), stats[0][1]
    return SymmetryGroup(order, labels, ab, orders, name_group(orders, ab), False,
                         [[labels[j] for j in r] for r in ntable], explicit_orders, warnings, notes)
