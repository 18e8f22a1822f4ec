"""Model checking of EFPL formulas by least-fixed-point saturation.

The solver enumerates the satisfying extensions of a partial variable
binding instead of testing every element of the universe: atoms are looked up
in relation tables, equations are solved by evaluating or inverting function
applications, and only variables constrained by nothing but negated atoms
fall back to enumerating the universe.  Conjuncts are scheduled
greedily, cheapest first.

Induction assertions are interpreted in one of two ways:

``saturate``
    compute the simultaneous least fixed point bottom-up (semi-naive by
    default, naive on request) and evaluate the body against the tables;
``demand``
    answer only the calls the body actually makes, with tabled, SCC-wise
    iteration to the least fixed point.  Used for structures too large to
    saturate (the meta structure).
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .structure import UNDEFINED, Assignment
from .syntax import (
    EQ,
    Atom,
    Conj,
    Disj,
    Exists,
    Let,
    NegAtom,
    Rule,
    Var,
    free_predicates,
    free_vars,
    heads,
    program_free_vars,
    term_vars,
)

_MISSING = object()
DELTA_SUFFIX = "#delta"


class EvaluationError(Exception):
    pass


class UnboundVariableError(EvaluationError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__("unbound free variables: " + ", ".join(self.names))


class UnknownRelationError(EvaluationError):
    pass


class UnsafeEnumeration(EvaluationError):
    """Solving would enumerate the universe of a lazy structure."""


class OracleTooLarge(EvaluationError):
    pass


# ---------------------------------------------------------------------------
# relation providers


class _BaseInterp:
    __slots__ = ("X", "rel")

    def __init__(self, X, rel):
        self.X, self.rel = X, rel

    def query(self, pattern):
        return self.X.query(self.rel, pattern)


class _TableInterp:
    """A fixed finite relation with lazily built indexes."""

    __slots__ = ("_index", "tuples")

    def __init__(self, tuples):
        self.tuples = tuples
        self._index = {}

    def query(self, pattern):
        bound = tuple(i for i, p in enumerate(pattern) if p is not None)
        if not bound:
            return self.tuples
        if len(bound) == len(pattern):
            return (pattern,) if pattern in self.tuples else ()
        idx = self._index.get(bound)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[i] for i in bound), []).append(t)
            self._index[bound] = idx
        return idx.get(tuple(pattern[i] for i in bound), ())


class _TabledInterp:
    __slots__ = ("engine", "inst", "pred")

    def __init__(self, engine, inst, pred):
        self.engine, self.inst, self.pred = engine, inst, pred

    def query(self, pattern):
        return self.engine.call(self.inst, self.pred, pattern)


# ---------------------------------------------------------------------------
# traces


@dataclass
class FixpointTrace:
    """Stages ``P^0 = {} <= P^1 <= ...`` per head symbol."""

    heads: list
    stages: dict  # head -> list of frozensets, index k = stage k
    closure_stage: int

    def delta(self, k):
        """Tuples added by stage ``k`` (``k >= 1``)."""
        return {h: self.stages[h][k] - self.stages[h][k - 1] for h in self.heads}


@dataclass
class LfpResult:
    tables: dict
    trace: FixpointTrace


def delta_formula(f, names):
    """Part of ``f`` that must use at least one ``names``-atom from the delta.

    Returns ``None`` when no atom over ``names`` occurs free in ``f``.  Nested
    Lets depending on ``names`` are kept whole (a sound over-approximation).
    """
    t = type(f)
    if t is Atom:
        return Atom(f.rel + DELTA_SUFFIX, f.args) if f.rel in names else None
    if t is NegAtom:
        return None
    if t is Conj:
        dl, dr = delta_formula(f.left, names), delta_formula(f.right, names)
        parts = []
        if dl is not None:
            parts.append(Conj(dl, f.right))
        if dr is not None:
            parts.append(Conj(f.left, dr))
        if not parts:
            return None
        return parts[0] if len(parts) == 1 else Disj(parts[0], parts[1])
    if t is Disj:
        dl, dr = delta_formula(f.left, names), delta_formula(f.right, names)
        if dl is None:
            return dr
        if dr is None:
            return dl
        return Disj(dl, dr)
    if t is Exists:
        d = delta_formula(f.body, names)
        return None if d is None else Exists(f.var, d)
    if t is Let:
        return f if free_predicates(f) & set(names) else None
    raise TypeError(f)


# ---------------------------------------------------------------------------
# the demand (tabled) engine


class _Instance:
    """One induction assertion instantiated with values for its parameters."""

    __slots__ = ("__weakref__", "ctx", "env", "rules")

    def __init__(self, program, env):
        self.rules = {r.head: r for r in program}
        self.env = env
        self.ctx = None


class _Table:
    __slots__ = ("answers", "complete", "frame", "iteration", "owner", "seen")

    def __init__(self):
        self.answers = []
        self.seen = set()
        self.complete = False
        self.frame = None
        self.owner = None
        self.iteration = -1


class _Frame:
    __slots__ = ("active", "depth", "iteration", "low", "owner", "pending", "recursive")

    def __init__(self, depth):
        self.depth = depth
        self.low = depth
        self.iteration = 0
        self.recursive = False
        self.pending = []
        self.active = True
        self.owner = None


class DemandEngine:
    """Tabled evaluation of program predicates with SCC-wise iteration.

    A call is a predicate plus a pattern of known argument values.  Calls that
    recur while still being evaluated consume the current answers; the lowest
    call on the stack of such a strongly connected group re-evaluates the group
    until no table grows, and only then marks the tables complete.
    """

    def __init__(self, evaluator):
        self.ev = evaluator
        self.tables = {}
        self.stack = []
        self.additions = 0
        self.calls = 0
        self.max_iterations = 0

    def _resolve(self, frame):
        while frame is not None and not frame.active:
            frame = frame.owner
        return frame

    def _depend(self, depth):
        top = self.stack[-1]
        top.low = min(top.low, depth)
        self.stack[depth].recursive = True

    def call(self, inst, pred, pattern):
        self.calls += 1
        key = (id(inst), pred, pattern)
        t = self.tables.get(key)
        if t is not None:
            if t.complete:
                return t.answers
            if t.frame is not None:
                self._depend(t.frame.depth)
                return list(t.answers)
            owner = self._resolve(t.owner)
            if owner is not None and owner.iteration == t.iteration:
                self._depend(owner.depth)
                return list(t.answers)
        else:
            t = _Table()
            self.tables[key] = t
        return self._evaluate(t, inst, pred, pattern)

    def _evaluate(self, t, inst, pred, pattern):
        frame = _Frame(len(self.stack))
        t.frame = frame
        self.stack.append(frame)
        full = None not in pattern
        converged = True
        try:
            while True:
                frame.iteration += 1
                before = self.additions
                self._run_rule(t, inst, pred, pattern, full)
                if frame.low < frame.depth:
                    break
                if full and t.answers:
                    converged = self.additions == before or not frame.recursive
                    break
                if not frame.recursive or self.additions == before:
                    break
            self.max_iterations = max(self.max_iterations, frame.iteration)
        finally:
            self.stack.pop()
            t.frame = None
            frame.active = False
        if frame.low < frame.depth:
            owner = self.stack[frame.low]
            frame.owner = owner
            t.owner, t.iteration = owner, owner.iteration
            owner.pending.append(t)
            for p in frame.pending:
                p.owner, p.iteration = owner, owner.iteration
                owner.pending.append(p)
            parent = self.stack[-1]
            parent.low = min(parent.low, frame.low)
        else:
            t.complete = True
            for p in frame.pending:
                if converged and p.iteration == frame.iteration:
                    p.complete = True
                else:
                    p.owner = None
        return t.answers

    def _run_rule(self, t, inst, pred, pattern, full):
        rule = inst.rules[pred]
        env = dict(inst.env)
        for p in rule.params:
            env.pop(p, None)
        for p, v in zip(rule.params, pattern):
            if v is not None:
                env[p] = v
        params = rule.params
        for r in self.ev.solve(rule.body, env, inst.ctx):
            vals = tuple(r.get(p, _MISSING) for p in params)
            for tup in self.ev._complete_tuple(vals):
                if tup not in t.seen:
                    t.seen.add(tup)
                    t.answers.append(tup)
                    self.additions += 1
            if full and t.answers:
                return


# ---------------------------------------------------------------------------
# the evaluator


class Evaluator:
    """Evaluates formulas in one structure; caches fixed points across calls."""

    def __init__(self, X, strategy=None, seminaive=True):
        if strategy is None:
            strategy = "demand" if getattr(X, "lazy", False) else "saturate"
        if strategy not in ("saturate", "demand"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.X = X
        self.strategy = strategy
        self.seminaive = seminaive
        self.engine = DemandEngine(self)
        self.traces = []
        self._base = {}
        self._const = {}
        self._lets = {}
        self._delta = {}

    # -- public ----------------------------------------------------------------

    def evaluate(self, f, s=None):
        s = dict(s or {})
        missing = free_vars(f) - set(s)
        if missing:
            raise UnboundVariableError(missing)
        for r in free_predicates(f):
            if not self.X.has_relation(r):
                raise UnknownRelationError(f"unknown relation {r}")
        for _ in self.solve(f, s, {}):
            return True
        return False

    def answers(self, f, s, names):
        """Set of value tuples for ``names`` that make ``f`` true, extending ``s``.

        Variables a solution leaves unconstrained range over the universe.
        """
        s = dict(s or {})
        missing = free_vars(f) - set(s) - set(names)
        if missing:
            raise UnboundVariableError(missing)
        out = set()
        for r in self.solve(f, s, {}):
            out.update(self._complete_tuple(tuple(r.get(n, _MISSING) for n in names)))
        return out

    def lfp(self, program, s=None, naive=None, ctx=None):
        env = dict(s or {})
        missing = program_free_vars(program) - set(env)
        if missing:
            raise UnboundVariableError(missing)
        naive = (not self.seminaive) if naive is None else naive
        return self._saturate(tuple(program), env, ctx or {}, naive)

    # -- terms -------------------------------------------------------------------

    def _ground(self, t, env):
        if type(t) is Var:
            return t.name in env
        for v in term_vars(t):
            if v not in env:
                return False
        return True

    def _val(self, t, env):
        if type(t) is Var:
            return env[t.name]
        if not term_vars(t):
            try:
                return self._const[t]
            except KeyError:
                pass
            args = [self._val(a, env) for a in t.args]
            v = UNDEFINED if UNDEFINED in args else self.X.apply(t.fn, args)
            self._const[t] = v
            return v
        args = []
        for a in t.args:
            v = self._val(a, env)
            if v is UNDEFINED:
                return UNDEFINED
            args.append(v)
        return self.X.apply(t.fn, args)

    def _match(self, t, value, env):
        if type(t) is Var:
            cur = env.get(t.name, _MISSING)
            if cur is _MISSING:
                e = dict(env)
                e[t.name] = value
                yield e
            elif cur == value:
                yield env
            return
        if self._ground(t, env):
            if self._val(t, env) == value:
                yield env
            return
        for args in self.X.invert(t.fn, value):
            yield from self._match_args(t.args, args, 0, env)

    def _match_args(self, ts, vals, i, env):
        if i == len(ts):
            yield env
            return
        for e in self._match(ts[i], vals[i], env):
            yield from self._match_args(ts, vals, i + 1, e)

    def _hint(self, t, env):
        """A finite candidate set for the one unbound argument of ``t``."""
        unbound = [i for i, a in enumerate(t.args) if not self._ground(a, env)]
        if len(unbound) != 1 or type(t.args[unbound[0]]) is not Var:
            return None
        pos = unbound[0]
        args = [None if i == pos else self._val(a, env) for i, a in enumerate(t.args)]
        if any(a is UNDEFINED for i, a in enumerate(args) if i != pos):
            return None
        cands = self.X.arg_candidates(t.fn, pos, args)
        if cands is None:
            return None
        return t.args[pos].name, cands

    def _complete_tuple(self, vals):
        if _MISSING not in vals:
            yield vals
            return
        holes = [i for i, v in enumerate(vals) if v is _MISSING]
        for combo in product(self.X.elements(), repeat=len(holes)):
            out = list(vals)
            for i, e in zip(holes, combo):
                out[i] = e
            yield tuple(out)

    # -- relations ---------------------------------------------------------------

    def _interp(self, rel, ctx):
        i = ctx.get(rel)
        if i is not None:
            return i
        i = self._base.get(rel)
        if i is None:
            if not self.X.has_relation(rel):
                raise UnknownRelationError(f"unknown relation {rel}")
            i = self._base[rel] = _BaseInterp(self.X, rel)
        return i

    # -- solving -----------------------------------------------------------------

    def solve(self, f, env, ctx):
        """Yield extensions of ``env`` under which ``f`` holds.

        Free variables of ``f`` left unbound in a result are unconstrained:
        every value for them satisfies ``f``.
        """
        t = type(f)
        if t is Atom:
            return self._atom(f, env, ctx)
        if t is NegAtom:
            return self._negatom(f, env, ctx)
        if t is Conj:
            return self._conj(_flatten(f), env, ctx)
        if t is Disj:
            return self._disj(f, env, ctx)
        if t is Exists:
            return self._exists(f, env, ctx)
        if t is Let:
            return self._let(f, env, ctx)
        raise TypeError(f"not a formula: {f!r}")

    def _check_enumerable(self, fs, env):
        if getattr(self.X, "lazy", False):
            from .parser import print_formula
            text = " & ".join(print_formula(f) for f in fs)
            raise UnsafeEnumeration(f"no finite way to solve {text} with bound {sorted(env)}")

    def _enumerate(self, f, env, ctx, names):
        self._check_enumerable([f], env)
        v = sorted(n for n in names if n not in env)[0]
        for e in self.X.elements():
            env2 = dict(env)
            env2[v] = e
            yield from self.solve(f, env2, ctx)

    def _atom(self, f, env, ctx):
        args = f.args
        if f.rel == EQ:
            a, b = args
            ga, gb = self._ground(a, env), self._ground(b, env)
            if ga and gb:
                va = self._val(a, env)
                if va is not UNDEFINED and va == self._val(b, env):
                    yield env
                return
            if ga or gb:
                known, other = (a, b) if ga else (b, a)
                v = self._val(known, env)
                if v is not UNDEFINED:
                    yield from self._match(other, v, env)
                return
            yield from self._enumerate(f, env, ctx, free_vars(f))
            return
        interp = self._interp(f.rel, ctx)
        pattern = []
        pending = []
        for i, t in enumerate(args):
            if self._ground(t, env):
                v = self._val(t, env)
                if v is UNDEFINED:
                    return
                pattern.append(v)
                continue
            if type(t) is not Var:
                hint = self._hint(t, env)
                if hint is not None:
                    name, cands = hint
                    for c in cands:
                        env2 = dict(env)
                        env2[name] = c
                        yield from self._atom(f, env2, ctx)
                    return
            pattern.append(None)
            pending.append(i)
        answers = interp.query(tuple(pattern))
        if not pending:
            if answers:
                yield env
            return
        pts = [args[i] for i in pending]
        for tup in answers:
            yield from self._match_args(pts, [tup[i] for i in pending], 0, env)

    def _negatom(self, f, env, ctx):
        if not all(self._ground(t, env) for t in f.args):
            yield from self._enumerate(f, env, ctx, free_vars(f))
            return
        vals = [self._val(t, env) for t in f.args]
        if UNDEFINED in vals:
            return
        if f.rel in ctx:
            raise EvaluationError(f"negated program predicate {f.rel}")
        if f.rel != EQ and not self.X.has_relation(f.rel):
            raise UnknownRelationError(f"unknown relation {f.rel}")
        if not self.X.holds(f.rel, vals):
            yield env

    def _cost(self, g, env, ctx):
        t = type(g)
        if t is Atom:
            if g.rel == EQ:
                ga, gb = self._ground(g.args[0], env), self._ground(g.args[1], env)
                if ga and gb:
                    return 0
                return 1 if ga or gb else None
            nfree = 0
            for a in g.args:
                if not self._ground(a, env):
                    nfree += 1
            if g.rel in ctx:
                # prefer calls whose first (input) argument is known
                first = 0 if not g.args or self._ground(g.args[0], env) else 20
                return 3 + 2 * nfree + first
            return 0 if nfree == 0 else 2 + nfree
        if t is NegAtom:
            for a in g.args:
                if not self._ground(a, env):
                    return None
            return 0
        nfree = sum(1 for v in free_vars(g) if v not in env)
        return 10 + 2 * nfree if nfree else 0.5

    def _conj(self, items, env, ctx):
        if not items:
            yield env
            return
        best, best_cost = -1, None
        for i, g in enumerate(items):
            c = self._cost(g, env, ctx)
            if c is not None and (best_cost is None or c < best_cost):
                best, best_cost = i, c
                if c == 0:
                    break
        if best < 0:
            self._check_enumerable(items, env)
            g = items[0]
            v = sorted(n for n in free_vars(g) if n not in env)[0]
            for e in self.X.elements():
                env2 = dict(env)
                env2[v] = e
                yield from self._conj(items, env2, ctx)
            return
        g = items[best]
        rest = items[:best] + items[best + 1:]
        for e in self.solve(g, env, ctx):
            yield from self._conj(rest, e, ctx)

    def _disj(self, f, env, ctx):
        yield from self.solve(f.left, env, ctx)
        yield from self.solve(f.right, env, ctx)

    def _exists(self, f, env, ctx):
        v = f.var
        had = v in env
        saved = env.get(v)
        inner = env
        if had:
            inner = dict(env)
            del inner[v]
        seen = set()
        for r in self.solve(f.body, inner, ctx):
            out = dict(r)
            out.pop(v, None)
            if had:
                out[v] = saved
            key = tuple((k, out[k]) for k in sorted(out.keys() - env.keys()))
            if key in seen:
                continue
            seen.add(key)
            yield out

    def _ctx_key(self, f, ctx):
        refs = tuple((p, ctx[p]) for p in sorted(free_predicates(f)) if p in ctx)
        return tuple((p, id(i)) for p, i in refs), refs

    def _let(self, f, env, ctx):
        fv = program_free_vars(f.program)
        missing = [v for v in fv if v not in env]
        if missing:
            yield from self._enumerate(f, env, ctx, missing)
            return
        penv = {v: env[v] for v in sorted(fv)}
        ckey, refs = self._ctx_key(f, ctx)
        key = (f.program, tuple(penv.items()), ckey)
        entry = self._lets.get(key)
        if entry is None:
            inner = dict(ctx)
            if self.strategy == "saturate":
                res = self._saturate(f.program, penv, ctx, not self.seminaive)
                self.traces.append((f, penv, res.trace))
                for h, tab in res.tables.items():
                    inner[h] = _TableInterp(tab)
            else:
                inst = _Instance(f.program, penv)
                for h in heads(f.program):
                    inner[h] = _TabledInterp(self.engine, inst, h)
                inst.ctx = inner
                refs = refs + (inst,)
            entry = self._lets[key] = (inner, refs)
        yield from self.solve(f.body, env, entry[0])

    # -- bottom-up saturation ------------------------------------------------------

    def _gamma(self, rule, env, ctx):
        e0 = {k: v for k, v in env.items() if k not in rule.params}
        out = set()
        params = rule.params
        for r in self.solve(rule.body, e0, ctx):
            out.update(self._complete_tuple(tuple(r.get(p, _MISSING) for p in params)))
        return out

    def _delta_rule(self, rule, hs):
        key = (rule, hs)
        if key not in self._delta:
            d = delta_formula(rule.body, set(hs))
            self._delta[key] = None if d is None else Rule(rule.head, rule.params, d)
        return self._delta[key]

    def _saturate(self, program, env, ctx, naive):
        hs = tuple(heads(program))
        full = {h: frozenset() for h in hs}
        stages = {h: [full[h]] for h in hs}
        delta = None
        k = 0
        while True:
            inner = dict(ctx)
            for h in hs:
                inner[h] = _TableInterp(full[h])
            new = {}
            if naive or delta is None:
                for r in program:
                    new[r.head] = frozenset(self._gamma(r, env, inner))
            else:
                for h in hs:
                    inner[h + DELTA_SUFFIX] = _TableInterp(delta[h])
                for r in program:
                    dr = self._delta_rule(r, hs)
                    extra = self._gamma(dr, env, inner) if dr is not None else ()
                    new[r.head] = full[r.head].union(extra)
            if all(new[h] == full[h] for h in hs):
                break
            delta = {h: new[h] - full[h] for h in hs}
            full = new
            k += 1
            for h in hs:
                stages[h].append(full[h])
        return LfpResult(dict(full), FixpointTrace(list(hs), stages, k))


def _flatten(f):
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is Conj:
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# module-level API


def run_deep(fn, *args, stack_mb=512, limit=1_000_000, **kwargs):
    """Call ``fn`` on a thread with a large stack and recursion limit.

    Solving nests one generator per formula node and per pending call, so
    top-down evaluation over the meta structure recurses far deeper than the
    interpreter default allows.
    """
    box = {}

    def target():
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller
            box["error"] = e

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, limit))
    threading.stack_size(stack_mb * 1024 * 1024)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def evaluate(f, s, X, strategy=None, seminaive=True):
    """Truth value of formula ``f`` under assignment ``s`` in structure ``X``."""
    return Evaluator(X, strategy=strategy, seminaive=seminaive).evaluate(f, s)


def lfp(program, s, X, naive=False):
    """Simultaneous least fixed point of ``program``, with its stage trace."""
    return Evaluator(X, seminaive=not naive).lfp(program, s, naive=naive)


@dataclass
class StageReport:
    closure_stage: int
    bound: int
    deltas: list = field(default_factory=list)  # deltas[k-1] = tuples new at stage k


def stage_bound(program, X):
    n = len(X.elements())
    return sum(n ** len(r.params) for r in program) + 1


def stage_report(program, X, s=None, naive=False):
    res = lfp(program, s or {}, X, naive=naive)
    tr = res.trace
    deltas = [tr.delta(k) for k in range(1, tr.closure_stage + 1)]
    return StageReport(tr.closure_stage, stage_bound(program, X), deltas)


def trace_lines(trace: FixpointTrace, X):
    """``stage <k>: <head> += (tuple)...`` lines, sorted by head then tuple."""
    name = getattr(X, "name", str)
    lines = []
    for k in range(1, trace.closure_stage + 1):
        d = trace.delta(k)
        for h in sorted(d):
            if not d[h]:
                continue
            tuples = sorted(tuple(name(e) for e in t) for t in d[h])
            body = " ".join("(" + ",".join(t) + ")" for t in tuples)
            lines.append(f"stage {k}: {h} += {body}")
    return lines


# ---------------------------------------------------------------------------
# independent reference evaluation (test oracles)


def brute_force_evaluate(f, s, X, interp=None):
    """Direct recursive evaluation that enumerates the universe at every
    quantifier and computes Let fixed points by plain Kleene iteration over
    all candidate tuples.  Slow; shares no code with :class:`Evaluator`."""
    interp = dict(interp or {})
    elems = list(X.elements())

    def val(t, env):
        if type(t) is Var:
            return env.get(t.name, UNDEFINED)
        args = [val(a, env) for a in t.args]
        if UNDEFINED in args:
            return UNDEFINED
        return X.apply(t.fn, args)

    def holds(rel, vals, rels):
        if rel in rels:
            return tuple(vals) in rels[rel]
        if rel == EQ:
            return vals[0] == vals[1]
        return X.holds(rel, vals)

    def go(g, env, rels):
        t = type(g)
        if t is Atom or t is NegAtom:
            vals = [val(a, env) for a in g.args]
            if UNDEFINED in vals:
                return False
            r = holds(g.rel, vals, rels)
            return r if t is Atom else not r
        if t is Conj:
            return go(g.left, env, rels) and go(g.right, env, rels)
        if t is Disj:
            return go(g.left, env, rels) or go(g.right, env, rels)
        if t is Exists:
            return any(go(g.body, {**env, g.var: e}, rels) for e in elems)
        if t is Let:
            cur = {r.head: frozenset() for r in g.program}
            while True:
                inner = {**rels, **cur}
                nxt = {}
                for r in g.program:
                    nxt[r.head] = frozenset(
                        tup for tup in product(elems, repeat=len(r.params))
                        if go(r.body, {**env, **dict(zip(r.params, tup))}, inner))
                if nxt == cur:
                    break
                cur = nxt
            return go(g.body, env, {**rels, **cur})
        raise TypeError(g)

    return go(f, dict(s or {}), interp)


def _ground_dnf(f, env, X, hs, elems):
    """Monotone DNF of ``f`` over ground head atoms (sets of required atoms)."""
    t = type(f)
    if t is Atom or t is NegAtom:
        vals = []
        for a in f.args:
            v = _bf_val(a, env, X)
            if v is UNDEFINED:
                return []
            vals.append(v)
        if t is Atom and f.rel in hs:
            return [frozenset([(f.rel, tuple(vals))])]
        if f.rel in hs:
            raise EvaluationError("negated head symbol")
        r = vals[0] == vals[1] if f.rel == EQ else X.holds(f.rel, vals)
        if t is NegAtom:
            r = not r
        return [frozenset()] if r else []
    if t is Conj:
        left = _ground_dnf(f.left, env, X, hs, elems)
        if not left:
            return []
        right = _ground_dnf(f.right, env, X, hs, elems)
        return _minimize([a | b for a in left for b in right])
    if t is Disj:
        return _minimize(_ground_dnf(f.left, env, X, hs, elems)
                         + _ground_dnf(f.right, env, X, hs, elems))
    if t is Exists:
        out = []
        for e in elems:
            out.extend(_ground_dnf(f.body, {**env, f.var: e}, X, hs, elems))
        return _minimize(out)
    raise OracleTooLarge("the enumeration oracle handles Let-free rule bodies only")


def _bf_val(t, env, X):
    if type(t) is Var:
        return env.get(t.name, UNDEFINED)
    args = [_bf_val(a, env, X) for a in t.args]
    if UNDEFINED in args:
        return UNDEFINED
    return X.apply(t.fn, args)


def _minimize(clauses):
    clauses = sorted(set(clauses), key=len)
    out = []
    for c in clauses:
        if not any(o <= c for o in out):
            out.append(c)
    return out


def lfp_oracle(program, s, X, limit=20):
    """Least closed point by enumerating every candidate interpretation.

    All ``2^N`` candidate tables (``N`` = number of possible head tuples) are
    enumerated as bit masks; the closed ones (``Gamma(C) <= C``) are
    intersected.  Raises :class:`OracleTooLarge` when ``N > limit``.
    """
    s = dict(s or {})
    elems = list(X.elements())
    atoms = []
    for r in program:
        atoms.extend((r.head, tup) for tup in product(elems, repeat=len(r.params)))
    n = len(atoms)
    if n > limit:
        raise OracleTooLarge(f"{n} candidate tuples exceed the enumeration limit {limit}")
    bit = {a: i for i, a in enumerate(atoms)}
    hs = {r.head for r in program}
    cand = np.arange(1 << n, dtype=np.int64)
    closed = np.ones(1 << n, dtype=bool)
    for r in program:
        for tup in product(elems, repeat=len(r.params)):
            env = {k: v for k, v in s.items() if k not in r.params}
            env.update(zip(r.params, tup))
            dnf = _ground_dnf(r.body, env, X, hs, elems)
            body = np.zeros(1 << n, dtype=bool)
            for clause in dnf:
                m = 0
                for a in clause:
                    m |= 1 << bit[a]
                body |= (cand & m) == m
            member = ((cand >> bit[(r.head, tup)]) & 1).astype(bool)
            closed &= ~body | member
    least = int(np.bitwise_and.reduce(cand[closed]))
    out = {r.head: set() for r in program}
    for a, i in bit.items():
        if least >> i & 1:
            out[a[0]].add(a[1])
    return {h: frozenset(v) for h, v in out.items()}


def as_assignment(s):
    return s if isinstance(s, Assignment) else Assignment(s or {})
