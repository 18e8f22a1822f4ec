"""Generation of the truth-definition program ``Pi_sat``.

Every defined notion (naturals, lists, assignments, terms, values, and the
satisfaction predicate ``Sat`` itself) becomes one rule of a single
simultaneous program over the meta vocabulary.  Semicolon-style partial
definitions are collected as disjuncts of one :class:`ClauseSchema`.

Bounded universal quantifiers are compiled into auxiliary rules that search
from 0 upwards, and quantification over list elements is reduced to that via
length and indexing.  Auxiliary heads are named ``Forall_k`` and carry all free
variables of their bodies as extra arguments.

Names used for defined relations:

``N(x)``, ``List(l)``, ``HasLength(l, n)``, ``Index(l, i, a)`` for
"(l)_i = a", ``Cat(a, b, l)``, ``Assgt(s)``, ``InDom(v, s)``,
``Lookup(s, v, a)`` for "s(v) = a", ``Term(t)``, ``Val(t, s, a)``,
``OneOneList(l)``, ``HS(r, p)``, ``HSPlus(l, m)``, ``ValPlus(l, s, m)``,
``Change(s, l, q, r)`` and ``Sat(phi, Pi, s)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .meta import META_FUNCTIONS, META_RELATIONS, meta_vocabulary
from .syntax import (
    EQ,
    App,
    Atom,
    Let,
    NegAtom,
    Rule,
    Var,
    Vocabulary,
    VocabularyError,
    all_variables,
    conj,
    disj,
    eq,
    exists,
    free_vars,
    primed,
    rename_var_free,
    term_vars,
)

HELPERS = ("N", "List", "HasLength", "Index", "Cat", "Assgt", "InDom", "Lookup", "Term", "Val",
           "OneOneList", "HS", "HSPlus", "ValPlus", "Change", "Sat")
AUX_PREFIX = "Forall"


def V(name):
    return Var(name)


def F(fn, *args):
    return App(fn, tuple(V(a) if isinstance(a, str) else a for a in args))


def R(rel, *args):
    return Atom(rel, tuple(V(a) if isinstance(a, str) else a for a in args))


def E(a, b):
    return eq(V(a) if isinstance(a, str) else a, V(b) if isinstance(b, str) else b)


def numeral(n):
    t = F("Zero")
    for _ in range(n):
        t = F("S", t)
    return t


@dataclass
class ClauseSchema:
    """A defined predicate given by a list of alternative bodies."""

    name: str
    params: tuple
    disjuncts: list = field(default_factory=list)

    def add(self, body):
        stray = free_vars(body) - set(self.params)
        if stray:
            raise ValueError(f"clause for {self.name} has stray free variables {sorted(stray)}")
        self.disjuncts.append(body)

    def rule(self):
        return Rule(self.name, tuple(self.params), disj(*self.disjuncts))


class AuxSupply:
    """Fresh auxiliary heads, shared between identical quantifier templates."""

    def __init__(self, taken=()):
        self.taken = set(taken)
        self.rules = []
        self._memo = {}
        self._count = 0

    def fresh(self):
        while True:
            self._count += 1
            name = f"{AUX_PREFIX}_{self._count}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def expand_bounded_forall(body, var, bound, supply: AuxSupply):
    """EFPL rendering of ``(forall var < bound) body``.

    Emits ``K(var, p...) <- var = 0 | exists w (var = S(w) & K(w, p...) & body(w))``
    with ``p...`` the other free variables of ``body``, and returns the
    formula ``K(bound, p...)``.
    """
    params = tuple(sorted(free_vars(body) - {var}))
    key = (body, var)
    head = supply._memo.get(key)
    if head is None:
        head = supply.fresh()
        used = all_variables(body) | set(params) | {var}
        w = primed("w", used)
        step = exists([w], conj(E(var, F("S", w)), R(head, w, *params),
                                rename_var_free(body, var, w)))
        supply.rules.append(Rule(head, (var,) + params, disj(E(var, F("Zero")), step)))
        supply._memo[key] = head
    return Atom(head, (bound,) + tuple(V(p) for p in params))


def expand_forall_in_list(body, var, lst, supply: AuxSupply):
    """EFPL rendering of ``(forall var in lst) body``:
    ``exists n (lst hasLength n & (forall i < n) exists z ((lst)_i = z & body(z)))``."""
    used = all_variables(body) | set(term_vars(lst)) | {var}
    n = primed("n", used)
    used.add(n)
    i = primed("i", used)
    used.add(i)
    z = primed("z", used)
    inner = exists([z], conj(R("Index", lst, i, z), rename_var_free(body, var, z)))
    return exists([n], conj(R("HasLength", lst, n),
                            expand_bounded_forall(inner, i, V(n), supply)))


def lift_plus(rel, params=0, name=None):
    """Rule lifting ``rel(u, p..., v)`` pointwise to equal-length lists.

    The lifting is defined by recursion on ``Append``: ``rel+(l, p..., m)``
    holds iff ``l`` and ``m`` are lists of one length whose ``i``-th entries
    are related for every ``i``.
    """
    ps = [f"p{k}" for k in range(params)] if params > 1 else (["s"] if params else [])
    name = name or f"{rel}Plus"
    base = conj(E("l", F("Nil")), E("m", F("Nil")))
    step = exists(["x", "u", "y", "v"], conj(
        E("l", F("Append", "x", "u")), E("m", F("Append", "y", "v")),
        R(name, "x", *ps, "y"), R(rel, "u", *ps, "v")))
    return Rule(name, ("l", *ps, "m"), disj(base, step))


def plus_displayed(rel, l, m, params=(), supply=None):
    """The pointwise lifting written with lengths and a bounded quantifier:
    ``exists n (l hasLength n & m hasLength n & (forall i < n) exists u, v
    ((l)_i = u & (m)_i = v & rel(u, p..., v)))``."""
    supply = supply or AuxSupply()
    used = set(params) | set(term_vars(l)) | set(term_vars(m))
    n, i, u, v = (primed(x, used) for x in ("n", "i", "u", "v"))
    inner = exists([u, v], conj(R("Index", l, i, u), R("Index", m, i, v),
                               R(rel, u, *params, v)))
    return exists([n], conj(R("HasLength", l, n), R("HasLength", m, n),
                            expand_bounded_forall(inner, i, V(n), supply))), supply


# ---------------------------------------------------------------------------
# helper definitions


def _schema(name, params, *bodies):
    c = ClauseSchema(name, tuple(params))
    for b in bodies:
        c.add(b)
    return c


def helper_schemas(supply: AuxSupply):
    out = [
        _schema("N", ["z"],
                E("z", F("Zero")),
                exists(["y"], conj(R("N", "y"), E("z", F("S", "y"))))),
        _schema("List", ["l"],
                E("l", F("Nil")),
                exists(["x", "a"], conj(R("List", "x"), E("l", F("Append", "x", "a"))))),
        _schema("HasLength", ["l", "n"],
                conj(E("l", F("Nil")), E("n", F("Zero"))),
                exists(["x", "a", "m"], conj(E("l", F("Append", "x", "a")),
                                             R("HasLength", "x", "m"), E("n", F("S", "m"))))),
        _schema("Index", ["l", "i", "a"],
                exists(["x"], conj(R("HasLength", "x", "i"), E("l", F("Append", "x", "a")))),
                exists(["x", "b"], conj(R("Index", "x", "i", "a"),
                                        E("l", F("Append", "x", "b"))))),
        _schema("Cat", ["a", "b", "l"],
                conj(E("b", F("Nil")), E("l", "a")),
                exists(["c", "x", "m"], conj(R("Cat", "a", "c", "m"),
                                             E("b", F("Append", "c", "x")),
                                             E("l", F("Append", "m", "x"))))),
        _schema("Assgt", ["s"],
                E("s", F("Empty")),
                exists(["t", "v", "a"], conj(R("Assgt", "t"), R("Vbl", "v"),
                                             E("s", F("Modify", "t", "v", "a"))))),
        _schema("InDom", ["v", "s"],
                exists(["t", "a"], E("s", F("Modify", "t", "v", "a")))),
        _schema("Lookup", ["s", "v", "a"],
                exists(["t"], E("s", F("Modify", "t", "v", "a")))),
    ]
    return out


def _indexed_values(n, lst, assignment):
    """``(l)_i = u_i & Val(u_i, s, b_i)`` for ``i < n``, with the names used."""
    us = [f"u{i}" for i in range(n)]
    bs = [f"b{i}" for i in range(n)]
    parts = []
    for i in range(n):
        parts.append(R("Index", lst, numeral(i), us[i]))
        parts.append(R("Val", us[i], assignment, bs[i]))
    return parts, us, bs


def term_schemas(base: Vocabulary, supply: AuxSupply):
    syms = base.symbols()
    term = ClauseSchema("Term", ("t",))
    term.add(R("Vbl", "t"))
    val = ClauseSchema("Val", ("t", "s", "a"))
    val.add(conj(R("Vbl", "t"), R("Assgt", "s"), R("Lookup", "s", "t", "a")))
    for f in sorted(base.functions):
        n = base.functions[f]
        name = F("SymName", numeral(syms.index(f)))
        every = expand_forall_in_list(R("Term", "x"), "x", V("l"), supply)
        term.add(exists(["l"], conj(E("t", F("Apply", name, "l")), R("List", "l"),
                                    R("HasLength", "l", numeral(n)), every)))
        parts, us, bs = _indexed_values(n, V("l"), "s")
        val.add(exists(["l", *us, *bs], conj(
            E("t", F("Apply", name, "l")), R("List", "l"), R("HasLength", "l", numeral(n)),
            R("Assgt", "s"), *parts, E("a", F(f, *bs)))))
    return [term, val]


def list_schemas(supply: AuxSupply):
    body = exists(["x", "y"], conj(R("Index", "l", "i", "x"), R("Index", "l", "j", "y"),
                                  disj(E("i", "j"), NegAtom(EQ, (V("x"), V("y"))))))
    inner = expand_bounded_forall(body, "j", V("n"), supply)
    outer = expand_bounded_forall(inner, "i", V("n"), supply)
    one_one = _schema("OneOneList", ["l"], exists(["n"], conj(R("HasLength", "l", "n"), outer)))
    hs = _schema("HS", ["r", "p"],
                 exists(["y", "z"], E("r", F("Rule", F("Apply", "p", "y"), "z"))))
    change = _schema("Change", ["s", "l", "q", "r"],
                     conj(E("l", F("Nil")), E("q", F("Nil")), E("s", "r")),
                     exists(["l'", "q'", "r'", "v", "a"], conj(
                         E("l", F("Append", "l'", "v")), E("q", F("Append", "q'", "a")),
                         R("Change", "s", "l'", "q'", "r'"),
                         E("r", F("Modify", "r'", "v", "a")))))
    return [one_one, hs, change]


def sat_schema(base: Vocabulary, supply: AuxSupply):
    syms = base.symbols()
    sat = ClauseSchema("Sat", ("phi", "Pi", "s"))
    # base atoms, then their negations for negatable symbols
    for negated in (False, True):
        for p in syms:
            if p not in base.relations:
                continue
            n, negatable = base.relations[p]
            if negated and not negatable:
                continue
            parts, us, bs = _indexed_values(n, V("l"), "s")
            atom = F("Apply", F("SymName", numeral(syms.index(p))), "l")
            lit = Atom(p, tuple(V(b) for b in bs))
            if negated:
                atom = F("Neg", atom)
                lit = NegAtom(p, lit.args)
            sat.add(exists(["l", *us, *bs], conj(
                E("phi", atom), R("List", "l"), R("HasLength", "l", numeral(n)),
                R("Assgt", "s"), *parts, lit)))
    sat.add(exists(["alpha", "beta"], conj(E("phi", F("Conj", "alpha", "beta")),
                                           R("Sat", "alpha", "Pi", "s"),
                                           R("Sat", "beta", "Pi", "s"))))
    sat.add(exists(["alpha", "beta"], conj(E("phi", F("Disj", "alpha", "beta")),
                                           disj(R("Sat", "alpha", "Pi", "s"),
                                                R("Sat", "beta", "Pi", "s")))))
    sat.add(exists(["alpha", "v", "a"], conj(E("phi", F("Quant", "v", "alpha")),
                                             R("Sat", "alpha", "Pi", F("Modify", "s", "v", "a")))))
    # extra-predicate atoms: unfold the rule of Pi with that head
    sat.add(exists(["p", "t", "k", "i", "m", "l", "r", "q", "delta"], conj(
        E("phi", F("Apply", "p", "t")), R("HasLength", "t", "k"), R("Arity", "p", "k"),
        expand_forall_in_list(R("Term", "x"), "x", V("t"), supply),
        R("HSPlus", "Pi", "m"), R("OneOneList", "m"),
        R("Index", "Pi", "i", F("Rule", F("Apply", "p", "l"), "delta")),
        R("OneOneList", "l"), R("HasLength", "l", "k"),
        expand_forall_in_list(R("Vbl", "x"), "x", V("l"), supply),
        R("ValPlus", "t", "s", "q"), R("Change", "s", "l", "q", "r"),
        R("Sat", "delta", "Pi", "r"))))
    # induction assertions: rename away from Pi, then extend the program
    sat.add(exists(["phi'", "Sigma", "alpha", "Theta"], conj(
        R("RenameAway", "phi", "Pi", "phi'"), E("phi'", F("IndAsrt", "Sigma", "alpha")),
        R("Cat", "Pi", "Sigma", "Theta"), R("Sat", "alpha", "Theta", "s"))))
    return sat


@dataclass
class SatLimits:
    """Extra predicate supply: arities up to ``K``, indices below ``I``."""

    K: int = 4
    I: int = 8


def generate_sat_program(base: Vocabulary, limits: SatLimits = None):
    """``Pi_sat`` for object formulas over ``base``, as a tuple of rules.

    Deterministic: equal vocabularies give structurally equal programs.
    """
    meta_vocabulary(base)  # rejects clashes with the meta vocabulary
    reserved = set(base.functions) | set(base.relations) | set(META_FUNCTIONS)
    reserved |= {r for r, _, _ in META_RELATIONS} | set(HELPERS)
    clash = set(HELPERS) & (set(base.functions) | set(base.relations))
    if clash:
        raise VocabularyError(f"base symbols clash with defined predicates: {sorted(clash)}")
    supply = AuxSupply(reserved)
    schemas = helper_schemas(supply) + term_schemas(base, supply) + list_schemas(supply)
    rules = [c.rule() for c in schemas]
    rules.append(lift_plus("HS"))
    rules.append(lift_plus("Val", 1))
    rules.append(sat_schema(base, supply).rule())
    return tuple(rules) + tuple(supply.rules)


def defined(program, name, *args):
    """``LET program THEN name(args)`` with string arguments read as variables."""
    return Let(tuple(program), R(name, *args))


def literal_expansion(program, name):
    """The formula a colon definition abbreviates: ``LET Q(z) <- delta(Q, z)
    THEN Q(z)`` for a self-contained rule of ``program``."""
    rule = next(r for r in program if r.head == name)
    return Let((rule,), Atom(name, tuple(V(p) for p in rule.params)))
