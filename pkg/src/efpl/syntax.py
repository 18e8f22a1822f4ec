"""Abstract syntax of existential fixed point logic.

Terms are variables or function applications; formulas are atoms, negated
atoms, binary conjunction/disjunction, existential quantification and
``let ... then ...`` induction assertions.  All nodes are immutable and
hashable; source spans are carried along but never take part in equality.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

EQ = "="


class _Node:
    """Mixin caching the structural hash of a frozen dataclass node."""

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, eq=True)
class Var(_Node):
    name: str
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.name,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class App(_Node):
    fn: str
    args: tuple = ()
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.fn, self.args)

    __hash__ = _Node.__hash__


Term = "Var | App"


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True, eq=True)
class Atom(_Node):
    rel: str
    args: tuple = ()
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.rel, self.args)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class NegAtom(_Node):
    rel: str
    args: tuple = ()
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.rel, self.args)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Conj(_Node):
    left: object
    right: object
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Disj(_Node):
    left: object
    right: object
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.left, self.right)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Exists(_Node):
    var: str
    body: object
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.var, self.body)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Rule(_Node):
    head: str
    params: tuple
    body: object
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.head, self.params, self.body)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, eq=True)
class Let(_Node):
    program: tuple
    body: object
    span: object = field(default=None, compare=False, repr=False)

    def _key(self):
        return (self.program, self.body)

    __hash__ = _Node.__hash__


Formula = "Atom | NegAtom | Conj | Disj | Exists | Let"
Program = tuple  # of Rule


def conj(*parts):
    """Right-nested conjunction of ``parts`` (at least one)."""
    parts = list(parts)
    out = parts.pop()
    while parts:
        out = Conj(parts.pop(), out)
    return out


def disj(*parts):
    parts = list(parts)
    out = parts.pop()
    while parts:
        out = Disj(parts.pop(), out)
    return out


def exists(names, body):
    for v in reversed(list(names)):
        body = Exists(v, body)
    return body


def eq(a, b):
    return Atom(EQ, (a, b))


# ---------------------------------------------------------------------------
# vocabularies


class VocabularyError(ValueError):
    pass


class Vocabulary:
    """Finite symbol table: function arities, relation arities and polarity.

    Equality is always present as a negatable binary relation.
    """

    def __init__(self, functions=(), relations=()):
        self.functions = {}
        self.relations = {EQ: (2, True)}
        for name, arity in dict(functions).items():
            self._check_new(name)
            if arity < 0:
                raise VocabularyError(f"negative arity for {name}")
            self.functions[name] = arity
        for item in relations:
            name, arity, negatable = item
            if name == EQ:
                if arity != 2 or not negatable:
                    raise VocabularyError("equality must be binary and negatable")
                continue
            self._check_new(name)
            self.relations[name] = (arity, bool(negatable))

    def _check_new(self, name):
        if name in self.functions or name in self.relations:
            raise VocabularyError(f"duplicate symbol {name}")

    def is_negatable(self, rel):
        return rel in self.relations and self.relations[rel][1]

    def relation_arity(self, rel):
        return self.relations[rel][0]

    def symbols(self):
        """Deterministic symbol order: equality, relations, then functions."""
        rels = [EQ] + sorted(r for r in self.relations if r != EQ)
        return rels + sorted(self.functions)

    def extend(self, functions=(), relations=()):
        out = Vocabulary(self.functions, [(n, a, p) for n, (a, p) in self.relations.items()])
        for name, arity in dict(functions).items():
            out._check_new(name)
            out.functions[name] = arity
        for name, arity, negatable in relations:
            out._check_new(name)
            out.relations[name] = (arity, bool(negatable))
        return out

    def __eq__(self, other):
        return (isinstance(other, Vocabulary) and self.functions == other.functions
                and self.relations == other.relations)

    def __hash__(self):
        return hash((frozenset(self.functions.items()), frozenset(self.relations.items())))

    def __repr__(self):
        fs = ", ".join(f"{n}/{a}" for n, a in sorted(self.functions.items()))
        rs = ", ".join(f"{n}/{a}{'' if p else '+'}" for n, (a, p) in sorted(self.relations.items()))
        return f"Vocabulary(functions=[{fs}], relations=[{rs}])"


# ---------------------------------------------------------------------------
# traversal helpers


def term_vars(t):
    cache = _TERM_VARS
    try:
        return cache[t]
    except KeyError:
        pass
    if isinstance(t, Var):
        out = frozenset((t.name,))
    else:
        out = frozenset().union(*(term_vars(a) for a in t.args)) if t.args else frozenset()
    cache[t] = out
    return out


_TERM_VARS = {}
_FREE_VARS = {}


def free_vars(f):
    """Variables with a free occurrence in a formula, rule or program."""
    try:
        return _FREE_VARS[f]
    except KeyError:
        pass
    if isinstance(f, (Atom, NegAtom)):
        out = frozenset().union(*(term_vars(a) for a in f.args)) if f.args else frozenset()
    elif isinstance(f, (Conj, Disj)):
        out = free_vars(f.left) | free_vars(f.right)
    elif isinstance(f, Exists):
        out = free_vars(f.body) - {f.var}
    elif isinstance(f, Rule):
        out = free_vars(f.body) - set(f.params)
    elif isinstance(f, Let):
        out = free_vars(f.body) | program_free_vars(f.program)
    elif isinstance(f, tuple):
        out = program_free_vars(f)
    else:
        raise TypeError(f"not a formula: {f!r}")
    _FREE_VARS[f] = out
    return out


def program_free_vars(program):
    out = frozenset()
    for r in program:
        out |= free_vars(r)
    return out


def heads(program):
    return [r.head for r in program]


def free_predicates(f, _bound=frozenset()):
    """Relation names with a free occurrence (equality excluded)."""
    if isinstance(f, (Atom, NegAtom)):
        return set() if f.rel == EQ or f.rel in _bound else {f.rel}
    if isinstance(f, (Conj, Disj)):
        return free_predicates(f.left, _bound) | free_predicates(f.right, _bound)
    if isinstance(f, Exists):
        return free_predicates(f.body, _bound)
    if isinstance(f, Let):
        inner = _bound | set(heads(f.program))
        out = free_predicates(f.body, inner)
        for r in f.program:
            out |= free_predicates(r.body, inner)
        return out
    raise TypeError(f"not a formula: {f!r}")


def bound_predicates(f):
    """Head symbols of every Let occurring in ``f``."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, Let):
            out.update(heads(g.program))
    return out


def relations_used(f):
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Atom, NegAtom)) and g.rel != EQ:
            out.add(g.rel)
    return out


def subformulas(f) -> Iterator:
    """Pre-order walk over all formula nodes, rule bodies included."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Conj, Disj)):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, Exists):
            stack.append(g.body)
        elif isinstance(g, Let):
            stack.append(g.body)
            for r in reversed(g.program):
                stack.append(r.body)


def all_variables(f):
    """Every variable name appearing anywhere, bound or free."""
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Atom, NegAtom)):
            for a in g.args:
                out |= term_vars(a)
        elif isinstance(g, Exists):
            out.add(g.var)
        elif isinstance(g, Let):
            for r in g.program:
                out.update(r.params)
    return out


def contains_let(f):
    return any(isinstance(g, Let) for g in subformulas(f))


def formula_size(f):
    return sum(1 for _ in subformulas(f))


# ---------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    path: tuple
    message: str

    def __str__(self):
        where = "/".join(str(p) for p in self.path) or "<root>"
        return f"{where}: {self.message}"


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def __str__(self):
        return "ok" if self.ok else "; ".join(str(v) for v in self.violations)


def validate(f, vocab: Vocabulary) -> ValidationReport:
    """Check well-formedness of ``f`` over ``vocab``.

    Relation names outside the vocabulary are extra predicates; they are
    positive, and each name must be used with a single arity throughout.
    """
    out = []
    arities = {}

    def check_term(t, path):
        if isinstance(t, Var):
            return
        if t.fn not in vocab.functions:
            out.append(Violation(path, f"unknown function symbol {t.fn}"))
        elif vocab.functions[t.fn] != len(t.args):
            out.append(Violation(path, f"function {t.fn} expects {vocab.functions[t.fn]} "
                                       f"arguments, got {len(t.args)}"))
        for i, a in enumerate(t.args):
            check_term(a, path + (f"arg{i}",))

    def note_arity(rel, n, path):
        if rel in vocab.relations:
            want = vocab.relations[rel][0]
            if want != n:
                out.append(Violation(path, f"relation {rel} has arity {want}, used with {n}"))
            return
        seen = arities.setdefault(rel, n)
        if seen != n:
            out.append(Violation(path, f"relation {rel} used with arities {seen} and {n}"))

    def walk(g, path, bound):
        if isinstance(g, (Atom, NegAtom)):
            note_arity(g.rel, len(g.args), path)
            if isinstance(g, NegAtom):
                if g.rel in bound or not vocab.is_negatable(g.rel):
                    out.append(Violation(path, f"negation of positive symbol {g.rel}: negation "
                                               "applies only to negatable relation symbols"))
            for i, a in enumerate(g.args):
                check_term(a, path + (f"arg{i}",))
        elif isinstance(g, (Conj, Disj)):
            walk(g.left, path + ("left",), bound)
            walk(g.right, path + ("right",), bound)
        elif isinstance(g, Exists):
            walk(g.body, path + ("body",), bound)
        elif isinstance(g, Let):
            hs = heads(g.program)
            if len(set(hs)) != len(hs):
                dup = next(h for h in hs if hs.count(h) > 1)
                out.append(Violation(path, f"two rules with head symbol {dup}: different rules "
                                           "must have different head symbols"))
            inner = bound | set(hs)
            for i, r in enumerate(g.program):
                rp = path + (f"rule{i}",)
                if r.head == EQ or vocab.is_negatable(r.head):
                    out.append(Violation(rp, f"head symbol {r.head} is not positive"))
                if len(set(r.params)) != len(r.params):
                    out.append(Violation(rp, f"head variables of {r.head} are not distinct"))
                note_arity(r.head, len(r.params), rp)
                walk(r.body, rp + ("body",), inner)
            walk(g.body, path + ("then",), inner)
        else:
            out.append(Violation(path, f"not a formula: {g!r}"))

    walk(f, (), frozenset())
    return ValidationReport(out)


def validate_program(program, vocab: Vocabulary) -> ValidationReport:
    """Validate a bare program by wrapping it in a trivial induction assertion."""
    probe = Let(tuple(program), eq(Var("_"), Var("_")))
    return validate(probe, vocab)


# ---------------------------------------------------------------------------
# fresh names


def primed(name, used):
    """Smallest primed variant of ``name`` not in ``used`` (``name`` itself first)."""
    cand = name
    while cand in used:
        cand += "'"
    return cand


def indexed(name, used):
    """Smallest ``name_k`` (k >= 1) not in ``used``."""
    k = 1
    while f"{name}_{k}" in used:
        k += 1
    return f"{name}_{k}"


# ---------------------------------------------------------------------------
# substitution


def subst_term(t, mapping):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))


def rename_var_free(f, old, new):
    """Rename free occurrences of variable ``old`` to ``new`` (no capture check)."""
    m = {old: Var(new)}

    def go(g):
        if isinstance(g, Atom):
            return Atom(g.rel, tuple(subst_term(a, m) for a in g.args))
        if isinstance(g, NegAtom):
            return NegAtom(g.rel, tuple(subst_term(a, m) for a in g.args))
        if isinstance(g, Conj):
            return Conj(go(g.left), go(g.right))
        if isinstance(g, Disj):
            return Disj(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return g if g.var == old else Exists(g.var, go(g.body))
        if isinstance(g, Let):
            prog = tuple(r if old in r.params else Rule(r.head, r.params, go(r.body))
                         for r in g.program)
            return Let(prog, go(g.body))
        raise TypeError(g)

    return go(f)


def rename_predicate(f, old, new):
    """Rename free occurrences of relation ``old``; stops under Lets rebinding it."""
    def go(g):
        if isinstance(g, Atom):
            return Atom(new, g.args) if g.rel == old else g
        if isinstance(g, NegAtom):
            return NegAtom(new, g.args) if g.rel == old else g
        if isinstance(g, Conj):
            return Conj(go(g.left), go(g.right))
        if isinstance(g, Disj):
            return Disj(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        if isinstance(g, Let):
            if old in heads(g.program):
                return g
            return Let(tuple(Rule(r.head, r.params, go(r.body)) for r in g.program), go(g.body))
        raise TypeError(g)

    return go(f)


# ---------------------------------------------------------------------------
# normal forms


class NotExistentialLogic(ValueError):
    pass


def _rename_apart(f, used):
    """Give every quantifier of a Let-free formula a distinct, non-clashing name."""
    def go(g, env):
        if isinstance(g, (Atom, NegAtom)):
            args = tuple(subst_term(a, env) for a in g.args)
            return type(g)(g.rel, args)
        if isinstance(g, (Conj, Disj)):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, Exists):
            name = primed(g.var, used)
            used.add(name)
            return Exists(name, go(g.body, {**env, g.var: Var(name)}))
        raise NotExistentialLogic("prenex normal form is defined for Let-free formulas")

    return go(f, {})


def to_prenex(f):
    """Equivalent formula of the shape ``exists ... exists (quantifier-free)``."""
    if contains_let(f):
        raise NotExistentialLogic("prenex normal form is defined for Let-free formulas")
    g = _rename_apart(f, set(free_vars(f)))

    def pull(h):
        if isinstance(h, (Atom, NegAtom)):
            return [], h
        if isinstance(h, Exists):
            qs, m = pull(h.body)
            return [h.var] + qs, m
        ql, ml = pull(h.left)
        qr, mr = pull(h.right)
        return ql + qr, type(h)(ml, mr)

    qs, matrix = pull(g)
    return exists(qs, matrix)


def is_prenex(f):
    while isinstance(f, Exists):
        f = f.body
    return all(not isinstance(g, (Exists, Let)) for g in subformulas(f))


def rename_away(f, program):
    """Rename bound predicates of ``f`` away from the head symbols of ``program``.

    Every Let inside ``f`` that binds a head of ``program`` gets that head
    replaced by the smallest fresh ``P_k``.  The result is equivalent to ``f``
    and binds no head of ``program``.
    """
    avoid = set(heads(program))
    if not avoid & bound_predicates(f):
        return f
    used = relations_used(f) | bound_predicates(f) | avoid
    for r in program:
        used |= relations_used(r.body) | bound_predicates(r.body)

    def go(g):
        if isinstance(g, (Atom, NegAtom)):
            return g
        if isinstance(g, (Conj, Disj)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        prog, body = g.program, g.body
        for h in heads(prog):
            if h in avoid:
                fresh = indexed(h, used)
                used.add(fresh)
                prog = tuple(Rule(fresh if r.head == h else r.head, r.params,
                                  rename_predicate(r.body, h, fresh)) for r in prog)
                body = rename_predicate(body, h, fresh)
        return Let(tuple(Rule(r.head, r.params, go(r.body)) for r in prog), go(body))

    return go(f)


def standardize_apart(f, reserved=()):
    """Alpha-rename every binder (quantifiers and rule head variables) to a
    distinct name that also differs from all free variables."""
    used = set(free_vars(f)) | set(reserved)

    def fresh(v):
        name = primed(v, used)
        used.add(name)
        return name

    def go(g, env):
        if isinstance(g, (Atom, NegAtom)):
            return type(g)(g.rel, tuple(subst_term(a, env) for a in g.args))
        if isinstance(g, (Conj, Disj)):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, Exists):
            n = fresh(g.var)
            return Exists(n, go(g.body, {**env, g.var: Var(n)}))
        rules = []
        for r in g.program:
            names = [fresh(p) for p in r.params]
            inner = {**env, **{p: Var(n) for p, n in zip(r.params, names)}}
            rules.append(Rule(r.head, tuple(names), go(r.body, inner)))
        return Let(tuple(rules), go(g.body, env))

    return go(f, {})


def iter_terms(f) -> Iterable:
    for g in subformulas(f):
        if isinstance(g, (Atom, NegAtom)):
            yield from g.args
