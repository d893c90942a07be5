"""End-to-end analysis: model -> determining systems -> symmetries -> verdicts."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace

from . import __version__
from .algsolve.groebner import Limits
from .algsolve.linear import nullspace
from .algsolve.pipeline import solve
from .algsolve.specialize import specialize_random
from .ansatz import instantiate_finite, instantiate_infinitesimal
from .detsys import build_finite_detsys, build_inf_detsys
from .errors import InconclusiveError, SolverBugError
from .model import AnalysisOptions, ControlModel, print_model, reduce_model
from .symmetry.classify import QUALIFIER, Bounds, biological_filter, classify, generators_from_nullspace
from .symmetry.group import group_structure
from .symmetry.transform import extract_transformations
from .verify import residual_ok, symbolic_residual

SCHEMA_VERSION = 1


@dataclass
class AnalysisReport:
    model: ControlModel  # as given (before state removal)
    options: AnalysisOptions
    analyzed_model: ControlModel
    transformations: list = field(default_factory=list)
    group: object = None
    generators: list = field(default_factory=list)
    nullspace: object = None
    solve_result: object = None
    algebraic_system: object = None
    verdicts: dict = field(default_factory=dict)
    biological: dict | None = None
    inconclusive: str | None = None
    caveats: list = field(default_factory=list)
    seed: int = 0

    @property
    def discrete_order(self):
        if self.solve_result is None or not self.solve_result.zero_dimensional:
            return None
        return self.solve_result.count

    def to_json(self, timestamp=None):
        sr = self.solve_result
        discrete = {
            "order": self.discrete_order,
            "zero_dimensional": None if sr is None else sr.zero_dimensional,
            "elements": [t.to_json() for t in self.transformations],
        }
        if self.group is not None:
            g = self.group.to_json()
            discrete.update({
                "abelian": g["abelian"],
                "element_orders": g["element_orders"],
                "group_name": g["group_name"],
                "exact_table": g["exact"],
                "group_notes": g["notes"] + g["warnings"],
            })
            if "table" in g:
                discrete["table"] = {"elements": g["elements"], "rows": g["table"]}
        if sr is not None and not sr.zero_dimensional:
            discrete["unknown_values"] = {u: v.to_json() for u, v in sr.unknown_values.items()}
        out = {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "symfind", "version": __version__},
            "model": {
                "name": self.model.name,
                "states": list(self.model.states),
                "params": list(self.model.params),
                "inputs": list(self.model.inputs),
                "outputs": list(self.model.output_names),
                "source": print_model(self.model),
            },
            "options": self.options.to_json(),
            "seed": self.seed,
            "continuous": {
                "dimension": None if self.nullspace is None else self.nullspace.dimension,
                "generators": [g.to_json() for g in self.generators],
            },
            "discrete": discrete,
            "verdicts": {
                "states": {s: self.verdicts[s].to_json() for s in self.model.states},
                "params": {p: self.verdicts[p].to_json() for p in self.model.params},
            },
            "caveats": list(self.caveats),
            "solver": None if sr is None else sr.to_json(),
            "inconclusive": self.inconclusive,
        }
        if self.biological is not None:
            b = self.biological
            out["biological"] = {
                "bounds": b["bounds"].to_json(),
                "kept": [t.id for t in b["kept"]],
                "discarded": [{"id": i, "reason": r} for i, r in b["discarded"]],
                "verdicts": {
                    "states": {s: b["verdicts"][s].to_json() for s in self.model.states},
                    "params": {p: b["verdicts"][p].to_json() for p in self.model.params},
                },
                "notes": list(b["notes"]),
            }
        if timestamp is not None:
            out["timestamp"] = timestamp
        return out

    def render_text(self):
        lines = [f"model {self.model.name}"]
        opts = self.options
        lines.append(f"ansatz: deg_x={opts.deg_x} deg_t={opts.deg_t} deg_xi={opts.deg_xi}"
                     f" theta_independent_of_x={opts.theta_independent_of_x}")
        if self.nullspace is not None:
            lines.append(f"continuous symmetries: dimension {self.nullspace.dimension}")
            for g in self.generators:
                parts = [f"{s}: {e}" for s, e in g.xi.items() if e] + [f"{p}: {e}" for p, e in g.zeta.items() if e]
                lines.append(f"  {g.id} = ({', '.join(parts)})")
        sr = self.solve_result
        if self.inconclusive:
            lines.append(f"discrete symmetries: inconclusive ({self.inconclusive})")
        elif sr is not None and sr.zero_dimensional:
            lines.append(f"discrete symmetries: {sr.count}")
            for t in self.transformations:
                lines.append(t.describe())
            if self.group is not None:
                g = self.group
                ab = {True: "abelian", False: "non-abelian", None: "abelian: unknown"}[g.abelian]
                lines.append(f"group: order {g.order}, {ab}, element orders {g.element_orders}, "
                             f"name {g.name or 'unmatched'}")
                lines.extend(f"  note: {n}" for n in g.notes + g.warnings)
        elif sr is not None:
            lines.append("discrete symmetries: positive-dimensional solution set")
            for u, v in sr.unknown_values.items():
                if not v.finite:
                    lines.append(f"  {u}: infinitely many values")
                elif v.rational_values():
                    lines.append(f"  {u} in {{{', '.join(str(x) for x in v.rational_values())}}}")
        lines.append("verdicts:")
        for n in (*self.model.states, *self.model.params):
            v = self.verdicts[n]
            wit = f" [{', '.join(v.witnesses)}]" if v.witnesses else ""
            lines.append(f"  {n}: {v.label}{wit}")
        if self.biological is not None:
            b = self.biological
            lines.append("biologically relevant sub-report:")
            for i, r in b["discarded"]:
                lines.append(f"  discarded {i}: {r}")
            for n in (*self.model.states, *self.model.params):
                lines.append(f"  {n}: {b['verdicts'][n].label}")
            lines.extend(f"  note: {x}" for x in b["notes"])
        for c in self.caveats:
            lines.append(f"caveat: {c}")
        return "\n".join(lines)


def analyze(mdl: ControlModel, opts: AnalysisOptions | None = None, limits: Limits | None = None, seed: int = 0,
            bounds: Bounds | None = None, infinitesimal: bool = True, group: bool = True) -> AnalysisReport:
    """Run the full analysis; ``opts.specialize_seed`` switches to a specialized (probabilistic) solve."""
    opts = opts or AnalysisOptions()
    opts.check(mdl)
    work, wopts = mdl, opts
    if opts.removed_states:
        work = reduce_model(mdl, opts)
        wopts = replace(opts, removed_states=())
    rep = AnalysisReport(mdl, opts, work, seed=seed)
    rep.caveats.append(f"global verdicts hold {QUALIFIER}"
                       f" (deg_x={opts.deg_x}, deg_t={opts.deg_t}, deg_xi={opts.deg_xi})")
    if opts.theta_independent_of_x:
        rep.caveats.append("transformed parameters assumed independent of the states (heuristic; may exclude symmetries)")
    if opts.deg_t == 0:
        rep.caveats.append("finite search restricted to time-independent transformations")
    if opts.removed_states:
        rep.caveats.append(f"states removed before the analysis: {', '.join(opts.removed_states)}")
    if opts.fixed_params:
        rep.caveats.append(f"parameters treated as known: {', '.join(sorted(opts.fixed_params))}")

    if infinitesimal:
        lin = instantiate_infinitesimal(build_inf_detsys(work, wopts), wopts)
        rep.nullspace = nullspace(lin, seed=seed)
        rep.generators = generators_from_nullspace(work, lin, rep.nullspace)

    asys = instantiate_finite(build_finite_detsys(work, wopts), wopts)
    if opts.specialize_seed is not None:
        asys = specialize_random(asys, opts.specialize_seed)
        rep.caveats.append("parameters specialized at a random rational point; results hold with high probability")
    rep.algebraic_system = asys
    try:
        rep.solve_result = solve(asys, limits, seed)
    except InconclusiveError as exc:
        rep.inconclusive = str(exc)
        rep.caveats.append("finite symmetry search hit its resource ceiling")
    sr = rep.solve_result
    if sr is not None:
        rep.caveats.extend(sr.notes)
        for note in asys.notes:
            if note not in rep.caveats:
                rep.caveats.append(note)
    if sr is not None and sr.zero_dimensional:
        rep.transformations = extract_transformations(sr, asys)
        for tr in rep.transformations:
            if not residual_ok(symbolic_residual(work, tr)):
                raise SolverBugError(f"extracted element {tr.id} fails the invariance check")
        if group:
            rep.group = group_structure(work, rep.transformations, seed)
            rep.caveats.extend(rep.group.warnings)

    common = dict(states=mdl.states, params=mdl.params, generators=rep.generators,
                  removed=opts.removed_states, fixed=tuple(sorted(opts.fixed_params)),
                  inconclusive=rep.inconclusive is not None)
    finite = {}
    if sr is not None and not sr.zero_dimensional:
        finite = dict(unknown_values=sr.unknown_values, ansatz=asys.ansatz,
                      params_ring=sr.params)
    rep.verdicts = classify(work, transformations=rep.transformations, **finite, **common)

    if bounds:
        notes = []
        if sr is not None and sr.zero_dimensional:
            kept, discarded = biological_filter(work, rep.transformations, bounds, seed)
            verdicts = classify(work, transformations=kept, **common)
        else:
            kept, discarded = list(rep.transformations), []
            verdicts = rep.verdicts
            notes.append("bounds filter applies to zero-dimensional symmetry sets only; verdicts unchanged")
        # the filter only removes witnesses, so it never demotes a global verdict
        for n, v in verdicts.items():
            if rep.verdicts[n].code == "global" and v.code != "global":
                raise SolverBugError(f"biological filter demoted {n}")
        rep.biological = {"bounds": bounds, "kept": kept, "discarded": discarded, "verdicts": verdicts,
                          "notes": notes}
    return rep


def write_json_atomic(path, data):
    """Write ``data`` as JSON via a temporary file and rename."""
    text = json.dumps(data, indent=2, sort_keys=False) + "\n"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".symfind-", suffix=".json", dir=d)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_schema():
    """The published JSON schema of analysis reports."""
    from importlib import resources

    return json.loads(resources.files("symfind").joinpath("schema/report.schema.json").read_text())
