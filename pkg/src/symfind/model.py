"""Control-model representation, the ``.sfm`` model language, and validation."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .cas import MPoly, RatFunc, VarRegistry
from .errors import ModelError, SymfindError

TIME = "t"
KEYWORDS = {"model", "states", "params", "inputs", "deq", "output"}


@dataclass(frozen=True)
class ControlModel:
    """``x' = f(t, x, u, theta)``, ``y = h(t, x, u, theta)``.

    Every expression lives over ``ring`` = (t, states, inputs, params).
    """

    name: str
    states: tuple[str, ...]
    params: tuple[str, ...]
    inputs: tuple[str, ...]
    rhs: tuple[RatFunc, ...]
    outputs: tuple[tuple[str, RatFunc], ...]
    ring: VarRegistry = field(repr=False, compare=False)

    @classmethod
    def build(cls, name, states, params, inputs, rhs, outputs):
        """Assemble from expressions given as RatFunc or source strings."""
        ring = model_ring(states, inputs, params)
        rhs = tuple(_as_ratfunc(e, ring) for e in rhs)
        outputs = tuple((n, _as_ratfunc(e, ring)) for n, e in outputs)
        return cls(name, tuple(states), tuple(params), tuple(inputs), rhs, outputs, ring)

    @property
    def n(self):
        return len(self.states)

    @property
    def k(self):
        return len(self.params)

    @property
    def m(self):
        return len(self.inputs)

    @property
    def l(self):
        return len(self.outputs)

    @property
    def output_names(self):
        return tuple(n for n, _ in self.outputs)

    @property
    def time(self):
        return TIME

    def f(self, state: str) -> RatFunc:
        return self.rhs[self.states.index(state)]

    @property
    def input_degree(self) -> int:
        """Maximal total degree in the inputs over all right-hand sides and outputs."""
        if not self.inputs:
            return 0
        exprs = list(self.rhs) + [h for _, h in self.outputs]
        return max(max(e.num.degree_in(self.inputs), 0) for e in exprs)

    @property
    def input_affine(self) -> bool:
        return self.input_degree <= 1

    def __eq__(self, other):
        if not isinstance(other, ControlModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.states == other.states
            and self.params == other.params
            and self.inputs == other.inputs
            and self.rhs == other.rhs
            and self.outputs == other.outputs
        )

    __hash__ = None


def model_ring(states, inputs, params) -> VarRegistry:
    names = [TIME, *states, *inputs, *params]
    kinds = ["time"] + ["state"] * len(states) + ["input"] * len(inputs) + ["parameter"] * len(params)
    return VarRegistry(names, kinds)


def _as_ratfunc(e, ring) -> RatFunc:
    if isinstance(e, RatFunc):
        return e.to_ring(ring) if e.ring != ring else e
    if isinstance(e, MPoly):
        return RatFunc(e.to_ring(ring))
    if isinstance(e, str):
        return parse_expression(e, ring)
    raise TypeError(f"cannot interpret {e!r} as an expression")


@dataclass(frozen=True)
class AnalysisOptions:
    deg_x: int = 1
    deg_t: int = 0
    deg_xi: int = 2
    theta_independent_of_x: bool = True
    fixed_params: frozenset = frozenset()
    specialize_seed: int | None = None
    removed_states: tuple = ()

    def __post_init__(self):
        for name in ("deg_x", "deg_t", "deg_xi"):
            if getattr(self, name) < 0:
                raise SymfindError(f"{name} must be nonnegative")
        object.__setattr__(self, "fixed_params", frozenset(self.fixed_params))
        object.__setattr__(self, "removed_states", tuple(self.removed_states))

    def check(self, mdl: ControlModel):
        bad = sorted(set(self.fixed_params) - set(mdl.params))
        if bad:
            raise ModelError(f"fixed parameters not in model: {', '.join(bad)}")
        bad = sorted(set(self.removed_states) - set(mdl.states))
        if bad:
            raise ModelError(f"removed states not in model: {', '.join(bad)}")

    def to_json(self):
        return {
            "deg_x": self.deg_x,
            "deg_t": self.deg_t,
            "deg_xi": self.deg_xi,
            "theta_independent_of_x": self.theta_independent_of_x,
            "fixed_params": sorted(self.fixed_params),
            "specialize_seed": self.specialize_seed,
            "removed_states": list(self.removed_states),
        }


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<decimal>\d+\.\d*|\.\d+|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),'={}])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize_line(text: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ModelError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind == "decimal":
            raise ModelError(f"decimal literal {m.group()!r} not allowed; write an exact rational like 3/2", lineno, pos + 1)
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), lineno, pos + 1))
        pos = m.end()
    return toks


class _ExprParser:
    """Precedence climbing: ``^`` > unary minus > ``* /`` > ``+ -``; ``^`` right-associative."""

    def __init__(self, toks: list[_Tok], ring: VarRegistry, line: int, end_col: int):
        self.toks = toks
        self.i = 0
        self.ring = ring
        self.line = line
        self.end_col = end_col

    def error(self, msg, tok=None):
        if tok is None:
            tok = self.peek()
        col = tok.col if tok else self.end_col
        return ModelError(msg, self.line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> RatFunc:
        if self.peek() is None:
            raise self.error("expected an expression")
        v = self.additive()
        if self.peek() is not None:
            raise self.error(f"unexpected token {self.peek().text!r}")
        return v

    def additive(self):
        v = self.multiplicative()
        while (t := self.peek()) is not None and t.text in "+-" and t.kind == "op":
            self.take()
            r = self.multiplicative()
            v = v + r if t.text == "+" else v - r
        return v

    def multiplicative(self):
        v = self.unary()
        while (t := self.peek()) is not None and t.kind == "op" and t.text in "*/":
            self.take()
            r = self.unary()
            if t.text == "*":
                v = v * r
            else:
                if r.is_zero():
                    raise ModelError("zero denominator: division by the zero polynomial", self.line, t.col)
                v = v / r
        return v

    def unary(self):
        t = self.peek()
        if t is not None and t.kind == "op" and t.text in "+-":
            self.take()
            v = self.unary()
            return -v if t.text == "-" else v
        return self.power()

    def power(self):
        base = self.primary()
        t = self.peek()
        if t is not None and t.kind == "op" and t.text == "^":
            self.take()
            et = self.peek()
            exp = self.power()
            if not exp.is_constant():
                raise self.error("exponent must be a nonnegative integer constant", et)
            k = exp.constant_value()
            if not isinstance(k, int) or k < 0:
                raise self.error("exponent must be a nonnegative integer constant", et)
            if k == 0 and base.is_zero():
                return RatFunc.const(self.ring, 1)
            return base**k
        return base

    def primary(self):
        t = self.take()
        if t is None:
            raise self.error("unexpected end of expression")
        if t.kind == "int":
            return RatFunc.const(self.ring, int(t.text))
        if t.kind == "ident":
            if t.text not in self.ring:
                raise ModelError(f"undeclared identifier {t.text!r}", self.line, t.col)
            return RatFunc.var(self.ring, t.text)
        if t.kind == "op" and t.text == "(":
            v = self.additive()
            c = self.take()
            if c is None or c.text != ")":
                raise self.error("expected ')'", c)
            return v
        raise ModelError(f"unexpected token {t.text!r}", self.line, t.col)


def parse_expression(text: str, ring: VarRegistry, line: int = 1) -> RatFunc:
    toks = _tokenize_line(text, line)
    return _ExprParser(toks, ring, line, len(text) + 1).parse()


def _ident_list(toks: list[_Tok], line: int) -> list[_Tok]:
    out = []
    expect_ident = True
    for t in toks:
        if expect_ident:
            if t.kind != "ident":
                raise ModelError(f"expected identifier, got {t.text!r}", line, t.col)
            out.append(t)
        elif t.text != ",":
            raise ModelError(f"expected ',', got {t.text!r}", line, t.col)
        expect_ident = not expect_ident
    if expect_ident:
        col = toks[-1].col + len(toks[-1].text) if toks else 1
        raise ModelError("expected identifier", line, col)
    return out


def parse_model(text: str) -> ControlModel:
    """Parse ``.sfm`` source into a validated-shape ``ControlModel``."""
    name = None
    closed = False
    decls = {"states": [], "params": [], "inputs": []}
    seen: dict[str, tuple[int, int]] = {TIME: (0, 0)}
    deqs: list[tuple[_Tok, list[_Tok], int, int]] = []
    outs: list[tuple[_Tok, list[_Tok], int, int]] = []
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        toks = _tokenize_line(raw, lineno)
        if not toks:
            continue
        head = toks[0]
        if closed:
            raise ModelError("content after closing '}'", lineno, head.col)
        if name is None:
            if head.text != "model":
                raise ModelError("expected 'model <name> {'", lineno, head.col)
            if len(toks) < 3 or toks[1].kind != "ident" or toks[2].text != "{":
                col = toks[1].col if len(toks) > 1 else head.col + 5
                raise ModelError("expected 'model <name> {'", lineno, col)
            if toks[1].text in KEYWORDS:
                raise ModelError("model name may not be a keyword", lineno, toks[1].col)
            name = toks[1].text
            if len(toks) > 3:
                raise ModelError(f"unexpected token {toks[3].text!r}", lineno, toks[3].col)
            continue
        if head.text == "}":
            if len(toks) > 1:
                raise ModelError(f"unexpected token {toks[1].text!r}", lineno, toks[1].col)
            closed = True
            continue
        if head.text in decls:
            if deqs or outs:
                raise ModelError(f"'{head.text}' must precede deq/output lines", lineno, head.col)
            for t in _ident_list(toks[1:], lineno):
                if t.text in KEYWORDS or t.text == TIME:
                    raise ModelError(f"reserved name {t.text!r}", lineno, t.col)
                if t.text in seen:
                    raise ModelError(f"duplicate name {t.text!r}", lineno, t.col)
                seen[t.text] = (lineno, t.col)
                decls[head.text].append(t.text)
            continue
        if head.text == "deq":
            if len(toks) < 4 or toks[1].kind != "ident" or toks[2].text != "'" or toks[3].text != "=":
                raise ModelError("expected \"deq <state>' = <expr>\"", lineno, head.col)
            deqs.append((toks[1], toks[4:], lineno, len(raw) + 1))
            continue
        if head.text == "output":
            if len(toks) < 3 or toks[1].kind != "ident" or toks[2].text != "=":
                raise ModelError("expected 'output <id> = <expr>'", lineno, head.col)
            outs.append((toks[1], toks[3:], lineno, len(raw) + 1))
            continue
        raise ModelError(f"unknown statement {head.text!r}", lineno, head.col)
    if name is None:
        raise ModelError("empty model source", 1, 1)
    if not closed:
        raise ModelError("missing closing '}'", len(lines) + 1, 1)
    states, params, inputs = decls["states"], decls["params"], decls["inputs"]
    if not states:
        raise ModelError("model declares no states", None, None)
    ring = model_ring(states, inputs, params)
    rhs: dict[str, RatFunc] = {}
    for st, etoks, lineno, end in deqs:
        if st.text not in states:
            raise ModelError(f"deq for undeclared state {st.text!r}", lineno, st.col)
        if st.text in rhs:
            raise ModelError(f"duplicate deq for state {st.text!r}", lineno, st.col)
        rhs[st.text] = _ExprParser(etoks, ring, lineno, end).parse()
    missing = [s for s in states if s not in rhs]
    if missing:
        raise ModelError(f"no deq for state(s): {', '.join(missing)}", None, None)
    outputs = []
    for ot, etoks, lineno, end in outs:
        if ot.text in seen or ot.text in KEYWORDS:
            raise ModelError(f"duplicate name {ot.text!r}", lineno, ot.col)
        seen[ot.text] = (lineno, ot.col)
        outputs.append((ot.text, _ExprParser(etoks, ring, lineno, end).parse()))
    if not outputs:
        raise ModelError("model declares no outputs", None, None)
    return ControlModel(name, tuple(states), tuple(params), tuple(inputs),
                        tuple(rhs[s] for s in states), tuple(outputs), ring)


def load_model(path) -> ControlModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def print_model(mdl: ControlModel) -> str:
    """Canonical source; ``parse_model(print_model(m)) == m``."""
    out = [f"model {mdl.name} {{"]
    out.append("  states " + ", ".join(mdl.states))
    if mdl.params:
        out.append("  params " + ", ".join(mdl.params))
    if mdl.inputs:
        out.append("  inputs " + ", ".join(mdl.inputs))
    for s, f in zip(mdl.states, mdl.rhs):
        out.append(f"  deq {s}' = {f}")
    for n, h in mdl.outputs:
        out.append(f"  output {n} = {h}")
    out.append("}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# validation and reduction

def validate_model(mdl: ControlModel) -> list[str]:
    """One finding per violated structural assumption; empty when all hold."""
    findings = []
    if mdl.n < 1:
        findings.append("model has no states")
    if mdl.l < 1:
        findings.append("model has no outputs")
    names = [TIME, *mdl.states, *mdl.params, *mdl.inputs, *mdl.output_names]
    if len(set(names)) != len(names):
        findings.append("variable names are not disjoint")
    if len(mdl.rhs) != mdl.n:
        findings.append("number of right-hand sides differs from number of states")
    exprs = [(f"rhs of {s}'", f) for s, f in zip(mdl.states, mdl.rhs)]
    exprs += [(f"output {n}", h) for n, h in mdl.outputs]
    for label, e in exprs:
        if e.den.is_zero():
            findings.append(f"{label} has a zero denominator")
        for u in mdl.inputs:
            if e.den.degree(u) > 0:
                findings.append(f"{label} not polynomial in input {u}")
    return findings


def reduce_model(mdl: ControlModel, opts: AnalysisOptions) -> ControlModel:
    """Drop ``opts.removed_states`` and their equations."""
    removed = list(opts.removed_states)
    if not removed:
        return mdl
    for s in removed:
        if s not in mdl.states:
            raise ModelError(f"cannot remove unknown state {s!r}")
    keep = [s for s in mdl.states if s not in removed]
    if not keep:
        raise ModelError("removing every state leaves no system")
    for s, f in zip(mdl.states, mdl.rhs):
        if s in removed:
            continue
        hit = sorted(f.variables() & set(removed))
        if hit:
            raise ModelError(f"removed state {hit[0]} still occurs in the equation for {s}")
    for n, h in mdl.outputs:
        hit = sorted(h.variables() & set(removed))
        if hit:
            raise ModelError(f"removed state {hit[0]} still occurs in output {n}")
    ring = model_ring(keep, mdl.inputs, mdl.params)
    rhs = tuple(f.to_ring(ring) for s, f in zip(mdl.states, mdl.rhs) if s not in removed)
    outputs = tuple((n, h.to_ring(ring)) for n, h in mdl.outputs)
    return ControlModel(mdl.name, tuple(keep), mdl.params, mdl.inputs, rhs, outputs, ring)
