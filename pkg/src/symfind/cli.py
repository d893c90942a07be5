"""``symfind`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 user error, 3 resource
ceiling reached (inconclusive).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path

from .algsolve.groebner import Limits
from .analysis import analyze, write_json_atomic
from .ansatz import instantiate_finite, instantiate_infinitesimal
from .detsys import build_finite_detsys, build_inf_detsys
from .errors import InconclusiveError, ModelError, SymfindError
from .model import AnalysisOptions, load_model, parse_model, print_model, reduce_model, validate_model
from .symmetry.classify import Bounds, parse_interval
from .symmetry.transform import SymmetryTransformation
from .verify import DEFAULT_TOL, verify_transformations

EXIT_OK, EXIT_FAIL, EXIT_USER, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UserError(SymfindError):
    pass


def bundled_models():
    return sorted(p.name[:-4] for p in resources.files("symfind").joinpath("models").iterdir() if p.name.endswith(".sfm"))


def resolve_model(spec: str):
    """A path to a ``.sfm`` file, or the name of a bundled model."""
    path = Path(spec)
    if path.is_file():
        return load_model(path)
    if not path.suffix and "/" not in spec and spec in bundled_models():
        text = resources.files("symfind").joinpath(f"models/{spec}.sfm").read_text()
        return parse_model(text)
    raise UserError(f"model file not found: {spec}")


def _options(args, mdl):
    opts = AnalysisOptions(
        deg_x=args.deg_x,
        deg_t=args.deg_t,
        deg_xi=args.deg_xi,
        theta_independent_of_x=not args.theta_depends_on_x,
        fixed_params=frozenset(args.fix_param or ()),
        specialize_seed=args.seed if getattr(args, "specialize", False) else None,
        removed_states=tuple(args.remove_state or ()),
    )
    opts.check(mdl)
    return opts


def _add_ansatz_flags(p):
    p.add_argument("--deg-x", type=int, default=1, help="degree of the finite ansatz in the states")
    p.add_argument("--deg-t", type=int, default=0, help="degree of the ansatz in t")
    p.add_argument("--deg-xi", type=int, default=2, help="degree of the infinitesimal ansatz")
    p.add_argument("--theta-depends-on-x", action="store_true",
                   help="let transformed parameters depend on the states")
    p.add_argument("--fix-param", action="append", metavar="NAME", help="treat a parameter as known")
    p.add_argument("--remove-state", action="append", metavar="NAME",
                   help="drop a state that no other equation or output uses")


def build_parser():
    ap = argparse.ArgumentParser(prog="symfind", description="Symmetry-based identifiability and observability analysis.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and validate a model, print its canonical form")
    p.add_argument("model")
    p.add_argument("--json", metavar="PATH", help="write a JSON summary ('-' for stdout)")

    p = sub.add_parser("detsys", help="print the determining system of a model")
    p.add_argument("model")
    p.add_argument("--infinitesimal", action="store_true")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--ansatz", action="store_true", help="also print the ansatz-instantiated system")
    _add_ansatz_flags(p)

    p = sub.add_parser("analyze", help="find symmetries and classify states and parameters")
    p.add_argument("model")
    _add_ansatz_flags(p)
    p.add_argument("--specialize", action="store_true", help="solve at a random rational parameter point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH", help="write the report as JSON ('-' for stdout)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp from the JSON report")
    p.add_argument("--positive", action="store_true", help="biological sub-report: all states and parameters > 0")
    p.add_argument("--bounds", action="append", metavar="NAME=LO:HI",
                   help="open interval for a variable; an empty end is unbounded")
    p.add_argument("--require", action="append", metavar="EXPR",
                   help="strict inequality such as 'gamma > nu' for the biological sub-report")
    p.add_argument("--dump-algsys", metavar="PATH", help="write the ansatz algebraic system as JSON")
    p.add_argument("--dump-groebner", metavar="PATH", help="write the Groebner bases of all cases as JSON")
    p.add_argument("--max-steps", type=int, default=None, help="Groebner reduction step ceiling")
    p.add_argument("--max-seconds", type=float, default=None, help="solver time ceiling")
    p.add_argument("--no-verify", action="store_true", help="skip the numeric check of the found elements")

    p = sub.add_parser("verify", help="re-check every element of a report")
    p.add_argument("model")
    p.add_argument("report")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    return ap


def _emit(path, data):
    if path == "-":
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
    else:
        write_json_atomic(path, data)


def cmd_parse(args):
    mdl = resolve_model(args.model)
    findings = validate_model(mdl)
    out = sys.stderr if args.json == "-" else sys.stdout
    print(print_model(mdl), end="", file=out)
    for f in findings:
        print(f"warning: {f}", file=sys.stderr)
    if args.json:
        _emit(args.json, {"name": mdl.name, "states": list(mdl.states), "params": list(mdl.params),
                          "inputs": list(mdl.inputs), "outputs": list(mdl.output_names),
                          "source": print_model(mdl), "findings": findings})
    return EXIT_OK


def cmd_detsys(args):
    mdl = resolve_model(args.model)
    opts = _options(args, mdl)
    if opts.removed_states:
        mdl = reduce_model(mdl, opts)
        opts = replace(opts, removed_states=())
    ds = (build_inf_detsys if args.infinitesimal else build_finite_detsys)(mdl, opts)
    out = sys.stderr if args.json == "-" else sys.stdout
    print(ds.to_text(), file=out)
    data = ds.to_json()
    if args.ansatz:
        if args.infinitesimal:
            lin = instantiate_infinitesimal(ds, opts)
            print(f"linear system: {len(lin.rows)} rows, {len(lin.columns)} columns", file=out)
            data["ansatz"] = lin.to_json()
        else:
            asys = instantiate_finite(ds, opts)
            print(f"algebraic system: {len(asys.equations)} equations in {len(asys.unknowns)} unknowns", file=out)
            for e in asys.equations:
                print(f"  {e} = 0", file=out)
            data["ansatz"] = asys.to_json()
    if args.json:
        _emit(args.json, data)
    return EXIT_OK


def cmd_analyze(args):
    mdl = resolve_model(args.model)
    opts = _options(args, mdl)
    bounds = None
    if args.positive or args.bounds or args.require:
        intervals = dict(parse_interval(b) for b in args.bounds or ())
        bounds = Bounds.build(mdl, args.positive, intervals, args.require or ())
    kw = {}
    if args.max_steps is not None:
        if args.max_steps <= 0:
            raise UserError("--max-steps must be positive")
        kw["steps"] = args.max_steps
    if args.max_seconds is not None:
        if args.max_seconds <= 0:
            raise UserError("--max-seconds must be positive")
        kw["seconds"] = args.max_seconds
    limits = Limits(**kw)
    rep = analyze(mdl, opts, limits, seed=args.seed, bounds=bounds)
    out = sys.stderr if args.json == "-" else sys.stdout
    print(rep.render_text(), file=out)
    res = []
    if rep.transformations and not args.no_verify:
        res = verify_transformations(rep.analyzed_model, rep.transformations, seed=args.seed)
        worst = max(r.numeric_abs for r in res)
        ok = all(r.passed for r in res)
        print(f"verification: {'pass' if ok else 'FAIL'} (max output deviation {worst:.1e} on 3 scenarios)",
              file=out)
        if not ok:
            rep.caveats.append("numeric verification failed for some elements")
    if args.dump_algsys and rep.algebraic_system is not None:
        _emit(args.dump_algsys, rep.algebraic_system.to_json())
    if args.dump_groebner and rep.solve_result is not None:
        _emit(args.dump_groebner, rep.solve_result.groebner_json())
    if args.json:
        stamp = None if args.no_timestamp else time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        data = rep.to_json(stamp)
        if res:
            data["verification"] = [r.to_json() for r in res]
        _emit(args.json, data)
    return EXIT_INCONCLUSIVE if rep.inconclusive else EXIT_OK


def cmd_verify(args):
    mdl = resolve_model(args.model)
    try:
        data = json.loads(Path(args.report).read_text())
    except (OSError, ValueError) as exc:
        raise UserError(f"cannot read report {args.report}: {exc}") from exc
    removed = tuple(data.get("options", {}).get("removed_states", ()))
    if removed:
        mdl = reduce_model(mdl, AnalysisOptions(removed_states=removed))
    elements = data.get("discrete", {}).get("elements", [])
    if not elements:
        print("report lists no discrete elements")
        return EXIT_OK
    try:
        trs = [SymmetryTransformation.from_json(mdl, d) for d in elements]
    except (KeyError, ModelError) as exc:
        raise UserError(f"report does not match the model: {exc}") from exc
    res = verify_transformations(mdl, trs, seed=args.seed, tol=args.tol)
    for r in res:
        sym = "pass" if r.symbolic_ok else "FAIL"
        print(f"{r.element}: symbolic {sym}, numeric max deviation {r.numeric_abs:.2e} "
              f"(rel {r.numeric_rel:.2e}) -> {'pass' if r.passed else 'FAIL'}")
        for bad in r.residuals:
            print(f"    {bad.condition}: {bad.value}")
    return EXIT_OK if all(r.passed for r in res) else EXIT_FAIL


COMMANDS = {"parse": cmd_parse, "detsys": cmd_detsys, "analyze": cmd_analyze, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InconclusiveError as exc:
        print(f"symfind: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (UserError, ModelError, OSError) as exc:
        print(f"symfind: {exc}", file=sys.stderr)
        return EXIT_USER
    except SymfindError as exc:
        if type(exc).__name__ in ("SolverBugError", "IntegrationError"):
            raise
        print(f"symfind: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
