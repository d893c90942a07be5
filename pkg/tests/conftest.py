import functools
from dataclasses import replace

import pytest
from hypothesis import HealthCheck, settings

from symfind.algsolve import solve
from symfind.ansatz import instantiate_finite
from symfind.cli import resolve_model
from symfind.detsys import build_finite_detsys
from symfind.model import AnalysisOptions, reduce_model
from symfind.symmetry import extract_transformations

settings.register_profile("symfind", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("symfind")

SEIRQ_OPTS = dict(fixed_params=("gamma",), removed_states=("R",))

# every bundled model with the options its finite analysis needs
CORPUS = {
    "decay": {},
    "decay_theta": {},
    "signflip": {},
    "goodwin": {},
    "goodwin_m2": {},
    "goodwin_m3": {},
    "goodwin_m5": {},
    "mammillary4": {},
    "llw1987": {},
    "seirq": SEIRQ_OPTS,
}
ZERO_DIM = [n for n in CORPUS if n != "llw1987"]


def model(name):
    return resolve_model(name)


def prepared(name, **kw):
    """(model after state removal, options without removal)."""
    mdl = model(name)
    opts = AnalysisOptions(**kw)
    if opts.removed_states:
        mdl = reduce_model(mdl, opts)
        opts = replace(opts, removed_states=())
    return mdl, opts


@functools.lru_cache(maxsize=None)
def finite_system(name):
    mdl, opts = prepared(name, **CORPUS[name])
    return instantiate_finite(build_finite_detsys(mdl, opts), opts)


@functools.lru_cache(maxsize=None)
def solved(name):
    asys = finite_system(name)
    res = solve(asys)
    trs = extract_transformations(res, asys) if res.zero_dimensional else []
    return asys, res, trs


@pytest.fixture
def mdl_of():
    return model


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        ok, title, secs = mod.RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f}s)")
