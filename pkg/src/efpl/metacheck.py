"""Checking the truth definition against native evaluation.

For a sentence ``phi`` over a base world, :func:`meta_check` evaluates
``LET Pi_sat THEN Sat(quote(phi), Nil(), Empty())`` in the truncated meta
structure and compares the verdict with direct evaluation of ``phi`` in the
base world embedded in that structure.

The embedding matters.  Quantifiers of ``phi`` range over the whole meta
structure, where every non-urelement is inert for the base symbols: base
functions are undefined on it and base relations false.  A formula with
``j`` variables cannot tell more than ``j`` such inert elements apart, so the
meta structure lets assignments take values among the urelements and ``j``
naturals, and the native side evaluates ``phi`` in the base world plus ``j``
inert elements (:func:`efpl.meta.with_junk`).
"""

from __future__ import annotations

import re
import time
from dataclasses import asdict, dataclass, field
from importlib import resources

from .evaluator import Evaluator, evaluate, run_deep
from .meta import (
    NIL,
    MetaStructure,
    QuoteContext,
    build_meta_structure,
    encode,
    encode_assignment,
    mklist,
    quote,
    to_meta_value,
    with_junk,
)
from .parser import parse_formula, parse_structure, print_formula
from .satgen import SatLimits, generate_sat_program
from .structure import Structure
from .syntax import (
    App,
    Atom,
    Conj,
    Disj,
    Exists,
    Let,
    NegAtom,
    Var,
    all_variables,
    free_predicates,
    free_vars,
    standardize_apart,
    validate,
)

MARGIN = 4


class DepthInsufficient(ValueError):
    """The bound cannot hold the elements the check needs."""

    def __init__(self, needed, given, reason="quote and evaluation footprint"):
        self.needed, self.given = needed, given
        super().__init__(f"depth insufficient: {reason} needs d >= {needed}, got {given}")


@dataclass
class MetaCheckReport:
    sentence: str
    depth: int
    native_verdict: bool
    sat_verdict: bool
    agreement: bool
    closure_stage: int
    elapsed: float

    def as_dict(self):
        return asdict(self)


@dataclass
class Footprint:
    depth: int
    quote_size: int
    assignment_size: int
    junk: int
    parts: dict = field(default_factory=dict)


def prepare(phi, standardize=True):
    """The sentence actually quoted: bound variables renamed apart.

    Sat unfolds an extra-predicate atom under the assignment of its call site,
    so a rule body variable that is re-bound between the Let and the call
    would be captured.  Distinct binder names rule that out.
    """
    return standardize_apart(phi) if standardize else phi


def junk_count(phi):
    return max(1, len(all_variables(phi)))


def footprint(phi, base: Structure, standardize=True, limits: SatLimits = None) -> Footprint:
    """Smallest bound under which no element used by the check overflows."""
    limits = limits or SatLimits()
    phi = prepare(phi, standardize)
    j = junk_count(phi)
    ctx = QuoteContext(base.vocab).scan(phi)
    X = MetaStructure(base, None, junk=j, K=limits.K, I=limits.I)
    q = encode(phi, ctx)
    max_value = max(v.size for v in X.values)
    assignment = 1 + sum(1 + (n + 2) + max_value for n in range(len(ctx.vars)))
    parts = {"quote": q.size, "assignment": assignment}
    sizes = []
    arities = [0]

    def visit(e, prog, seen):
        key = (e, prog)
        if key in seen:
            return
        seen.add(key)
        t = e.tag
        if t in ("Conj", "Disj"):
            visit(e.args[0], prog, seen)
            visit(e.args[1], prog, seen)
        elif t == "Quant":
            visit(e.args[1], prog, seen)
        elif t == "Apply" and e.args[0].tag == "XP":
            arities.append(e.args[0].args[0])
            for r in prog.args:
                head, body = r.args
                if head.args[0] is e.args[0]:
                    visit(body, prog, seen)
        elif t == "IndAsrt":
            renamed = X.rename_away(e, prog)
            if renamed is None:
                raise DepthInsufficient(None, None, "extra predicate supply (raise I)")
            sigma, alpha = renamed.args
            theta = mklist(prog.args + sigma.args)
            heads = mklist([r.args[0].args[0] for r in theta.args])
            sizes.extend((renamed.size, theta.size, heads.size))
            visit(alpha, theta, seen)

    visit(q, NIL, set())
    parts["program"] = max(sizes, default=0)
    parts["values"] = 1 + max(arities) * (1 + max_value)
    parts["symbols"] = len(base.vocab.symbols()) + 1
    need = max(parts.values())
    return Footprint(need, q.size, assignment, j, parts)


_SAT_CACHE = {}


def sat_program(vocab, limits: SatLimits = None):
    limits = limits or SatLimits()
    key = (vocab, limits.K, limits.I)
    if key not in _SAT_CACHE:
        _SAT_CACHE[key] = generate_sat_program(vocab, limits)
    return _SAT_CACHE[key]


def sat_formula(phi, base: Structure, limits=None, ctx=None):
    """``LET Pi_sat THEN Sat(quote(phi), Nil(), Empty())``."""
    ctx = ctx or QuoteContext(base.vocab).scan(phi)
    return Let(sat_program(base.vocab, limits),
               Atom("Sat", (quote(phi, ctx), App("Nil", ()), App("Empty", ()))))


def meta_check(phi, base: Structure, d=None, standardize=True,
               limits: SatLimits = None) -> MetaCheckReport:
    """Compare the Sat verdict for sentence ``phi`` with its native verdict."""
    limits = limits or SatLimits()
    if free_vars(phi):
        raise ValueError(f"not a sentence: free variables {sorted(free_vars(phi))}")
    report = validate(phi, base.vocab)
    if not report.ok:
        raise ValueError(f"invalid sentence: {report}")
    fp = footprint(phi, base, standardize, limits)
    if d is None:
        d = fp.depth + MARGIN
    if d < fp.depth:
        raise DepthInsufficient(fp.depth, d)
    start = time.perf_counter()
    quoted = prepare(phi, standardize)
    X = build_meta_structure(base, d, junk=fp.junk, K=limits.K, I=limits.I)
    ev = Evaluator(X, strategy="demand")
    sat = run_deep(ev.evaluate, sat_formula(quoted, base, limits))
    native = evaluate(phi, {}, with_junk(base, fp.junk))
    elapsed = time.perf_counter() - start
    return MetaCheckReport(print_formula(phi), d, native, sat, native == sat,
                           ev.engine.max_iterations, round(elapsed, 4))


@dataclass
class StabilityReport:
    reports: list
    stable: bool

    def as_dict(self):
        return {"stable": self.stable, "reports": [r.as_dict() for r in self.reports]}


def depth_stability(phi, base: Structure, depths=None, count=3, standardize=True,
                    limits=None) -> StabilityReport:
    """Run :func:`meta_check` at several bounds; verdicts must not flip."""
    if depths is None:
        d0 = footprint(phi, base, standardize, limits).depth
        depths = range(d0, d0 + count)
    reports = [meta_check(phi, base, d, standardize, limits) for d in depths]
    verdicts = {(r.native_verdict, r.sat_verdict) for r in reports}
    return StabilityReport(reports, len(verdicts) == 1 and all(r.agreement for r in reports))


def native_extension(X: MetaStructure, program, name, arity, keys, position=0):
    """Tuples of the defined predicate ``name`` of ``program`` in ``X`` whose
    component at ``position`` lies in ``keys``, by native (demand) evaluation.

    The key position must be one from which the definition can be solved
    finitely (for ``Cat(a, b, l)`` that is ``l``).
    """
    ev = Evaluator(X, strategy="demand")
    names = [f"y{i}" for i in range(arity)]
    rest = names[:position] + names[position + 1:]
    f = Let(tuple(program), Atom(name, tuple(Var(v) for v in names)))

    def run():
        out = set()
        for e in keys:
            for t in ev.answers(f, {names[position]: e}, rest):
                out.add(t[:position] + (e,) + t[position:])
        return out

    return run_deep(run)


@dataclass
class ContractReport:
    native_verdict: bool
    sat_verdict: bool
    depth: int

    @property
    def agreement(self):
        return self.native_verdict == self.sat_verdict


def sat_contract(psi, program, s, base: Structure, d=None, limits: SatLimits = None):
    """``Sat(quote(psi), quote(program), quote(s))`` against native evaluation
    of ``psi`` under ``s`` with the heads of ``program`` at their least fixed point.

    ``s`` maps variables to elements of ``with_junk(base, j)`` where ``j`` is
    the number of variables of ``LET program THEN psi``.  Bound variables of
    ``psi`` must not occur free in ``program`` (rule bodies see the assignment
    of the call site).
    """
    limits = limits or SatLimits()
    whole = Let(tuple(program), psi)
    j = junk_count(whole)
    native_world = with_junk(base, j)
    fp = footprint(whole, base, standardize=False, limits=limits)
    if d is None:
        d = fp.depth + MARGIN
    if d < fp.depth:
        raise DepthInsufficient(fp.depth, d)
    ctx = QuoteContext(base.vocab).scan(whole)
    for v in sorted(s):
        ctx.var(v)
    X = build_meta_structure(base, d, junk=j, K=limits.K, I=limits.I)
    s_hat = encode_assignment({v: to_meta_value(X, e) for v, e in s.items()}, ctx)
    if not X.contains(s_hat):
        raise DepthInsufficient(s_hat.size, d, "encoded assignment")
    query = Let(sat_program(base.vocab, limits),
                Atom("Sat", (quote(psi, ctx), quote(tuple(program), ctx), Var("#s"))))
    ev = Evaluator(X, strategy="demand")
    sat = run_deep(ev.evaluate, query, {"#s": s_hat})
    native = evaluate(whole, dict(s), native_world)
    return ContractReport(native, sat, d)


# ---------------------------------------------------------------------------
# shrinking


def _reductions(f):
    """Formulas obtained by replacing one subformula by one of its parts."""
    t = type(f)
    if t in (Atom, NegAtom):
        return
    if t in (Conj, Disj):
        yield f.left
        yield f.right
        for g in _reductions(f.left):
            yield t(g, f.right)
        for g in _reductions(f.right):
            yield t(f.left, g)
    elif t is Exists:
        yield f.body
        for g in _reductions(f.body):
            yield Exists(f.var, g)
    elif t is Let:
        yield f.body
        for g in _reductions(f.body):
            yield Let(f.program, g)
        for i, r in enumerate(f.program):
            for g in _reductions(r.body):
                prog = f.program[:i] + (type(r)(r.head, r.params, g),) + f.program[i + 1:]
                yield Let(prog, f.body)


def shrink(phi, still_failing, vocab=None):
    """Greedy subformula deletion while ``still_failing`` holds."""
    changed = True
    while changed:
        changed = False
        for g in _reductions(phi):
            if free_vars(g):
                continue
            if vocab is not None and free_predicates(g) - set(vocab.relations):
                continue
            if vocab is not None and not validate(g, vocab).ok:
                continue
            try:
                bad = still_failing(g)
            except DepthInsufficient:
                bad = False
            if bad:
                phi, changed = g, True
                break
    return phi


def minimized_counterexample(phi, base, d=None, standardize=True):
    """Smallest sentence reachable by deletion that still disagrees."""

    def disagrees(g):
        dd = None if d is None else max(d, footprint(g, base, standardize).depth)
        return not meta_check(g, base, dd, standardize).agreement

    return shrink(phi, disagrees, base.vocab)


# ---------------------------------------------------------------------------
# the bundled corpus


def corpus_text(name):
    return resources.files("efpl.corpus").joinpath(name).read_text()


def load_corpus():
    """``(base structure, [(label, sentence)])`` of the bundled corpus."""
    vocab, base = parse_structure(corpus_text("base.efs"))
    return base, parse_sentences(corpus_text("sentences.efl"), vocab)


_LABEL = re.compile(r"^([\w-]+):\s*(.*)$")


def parse_sentences(text, vocab=None):
    """One sentence per line; ``#`` starts a comment, ``label:`` prefixes are optional."""
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        label = f"line{n}"
        m = _LABEL.match(line)
        if m:
            label, line = m.groups()
        out.append((label, parse_formula(line, vocab)))
    return out
